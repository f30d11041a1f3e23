#pragma once

#include "curveshift/kernels.hpp"
#include "curveshift/sample.hpp"

#include <cstddef>
#include <memory>
#include <vector>

namespace curveshift {

/// Time-varying long-run variance estimate built from paired-block
/// differences of the raw responses (the paired difference cancels smooth
/// trends to first order). Constant on [0, m/n] and [1 - m/n, 1].
class LrvEstimate {
public:
    double evaluate(double t) const;
    std::size_t block_size() const { return m_; }
    double bandwidth() const { return tau_; }

private:
    friend LrvEstimate estimate_lrv(const Sample&, std::size_t, double,
                                    const KernelSpec&);
    std::vector<double> points_;  // j/n for valid blocks
    std::vector<double> values_;  // m * delta_j^2 / 2
    std::size_t m_ = 0;
    double tau_ = 0.0;
    double t_lo_ = 0.0, t_hi_ = 0.0;
    std::function<double(double)> kernel_;
};

std::size_t default_block_size(std::size_t n);
double default_lrv_bandwidth(std::size_t n);

/// Requires 2 <= m and tau in (m/n, 0.5); throws BlockTooLarge for m > n/4.
LrvEstimate estimate_lrv(const Sample& sample, std::size_t m, double tau,
                         const KernelSpec& spec);

} // namespace curveshift
