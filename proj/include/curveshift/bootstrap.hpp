#pragma once

#include "curveshift/lrv.hpp"
#include "curveshift/rng.hpp"
#include "curveshift/shift.hpp"
#include "curveshift/test_statistic.hpp"

#include <cstdint>
#include <vector>

namespace curveshift {

struct BootstrapConfig {
    std::size_t N = 0;      // derivative grid size (shared by both samples)
    double h1 = 0.0;        // density bandwidths
    double h2 = 0.0;
    double b1 = 0.0;        // smoothing bandwidths
    double b2 = 0.0;
    std::size_t M = 1000;   // quadrature nodes for the integral
};

/// Read-only tables shared by all replicates of one test: per sample the
/// derivative-kernel matrix on the quadrature grid, the sparse band of
/// equivalent-kernel weights linking design points to grid points, and
/// the long-run standard deviations at the design points. One replicate
/// is then two band products and two dense mat-vecs.
class BootstrapPlan {
public:
    BootstrapPlan(const DensityEstimate& dens1, const DensityEstimate& dens2,
                  const LrvEstimate& lrv1, const LrvEstimate& lrv2,
                  std::size_t n1, std::size_t n2, const ShiftEstimate& shift,
                  const BootstrapConfig& config, const KernelSpec& spec);

    /// One draw of the bootstrap functional; rng1/rng2 feed the
    /// multipliers of sample 1 / sample 2.
    double replicate(Rng& rng1, Rng& rng2) const;

    const Window& window() const { return window_; }

private:
    struct SampleTables {
        std::size_t n = 0;
        std::size_t R = 0;                // retained grid atoms
        double norm = 0.0;                // 1 / (n N b^2 h^2)
        std::vector<double> sigma;        // long-run sd at j/n
        std::vector<double> kd_matrix;    // M x R, row-major
        std::vector<std::size_t> band_start; // per design point, first atom index
        std::vector<std::size_t> band_len;
        std::vector<double> band_values;  // equivalent-kernel weights, packed
        std::vector<std::size_t> band_offset;
    };

    void build_tables(SampleTables& tab, const DensityEstimate& dens,
                      const LrvEstimate& lrv, std::size_t n, double b, double h,
                      const KernelSpec& spec);

    SampleTables s1_, s2_;
    std::vector<double> quad_weights_;
    std::vector<double> grid_;
    Window window_;
    std::size_t M_ = 0;
    std::size_t N_ = 0;
};

struct BootstrapResult {
    std::vector<double> draws; // sorted ascending
    std::size_t B = 0;
    double p_value = 1.0;
    bool reject = false;
    double alpha = 0.05;
    std::uint64_t seed = 0;

    /// Rejection of `value` at `alpha` against the stored order statistics.
    bool rejects(double value, double alpha) const;
};

/// One draw built directly from the pipeline objects (convenience path;
/// builds the internal tables each call).
double bootstrap_replicate(const CurveEstimate& curve1, const CurveEstimate& curve2,
                           const LrvEstimate& lrv1, const LrvEstimate& lrv2,
                           std::size_t n1, std::size_t n2, const ShiftEstimate& shift,
                           const BootstrapConfig& config, const KernelSpec& spec,
                           Rng& rng1, Rng& rng2);

/// B independent replicates with streams derived from (seed, replicate,
/// sample); reproducible and order-independent under parallel execution.
/// Decision: stat.value > W_(floor(B(1-alpha))), p-value 1 - B*/B with
/// B* the count of draws <= stat.value.
BootstrapResult bootstrap_test(const TestStatistic& stat, std::size_t B, double alpha,
                               const BootstrapPlan& plan, std::uint64_t seed,
                               unsigned threads = 0);

} // namespace curveshift
