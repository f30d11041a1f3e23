#pragma once

#include "curveshift/kernels.hpp"
#include "curveshift/sample.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace curveshift {

/// Evaluable level/derivative estimate on [0, 1].
///
/// Fitted instances solve the local weighted least squares problem lazily
/// at each query point. On [0, bandwidth] and [1 - bandwidth, 1] the
/// derivative is clamped to its nearest interior value and the level is
/// extended along the local line at the nearest interior point.
/// Immutable and safe to evaluate concurrently.
class CurveEstimate {
public:
    double level(double t) const;
    double derivative(double t) const;
    double bandwidth() const;

    /// Wrap closed-form functions (test fixtures, oracles).
    static CurveEstimate analytic(std::function<double(double)> level,
                                  std::function<double(double)> derivative,
                                  double bandwidth);

private:
    struct Impl;
    explicit CurveEstimate(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;

    friend CurveEstimate fit_local_linear(const Sample&, double, const KernelSpec&);
};

/// Weighted least squares line in a kernel window at each query point;
/// intercept estimates the level, slope the derivative.
/// Throws SingularDesign when the local 2x2 normal matrix has condition
/// number > 1e12 (bandwidth too small for the design).
CurveEstimate fit_local_linear(const Sample& sample, double bandwidth,
                               const KernelSpec& spec);

/// 12 log-spaced candidates in [0.5 n^{-1/5}, 2 n^{-1/5}], capped below 0.5.
std::vector<double> default_gcv_grid(std::size_t n, std::size_t count = 12);

/// Generalized cross validation score for one bandwidth:
///   n^{-1} sum (y_i - mhat(i/n))^2 / (1 - K(0)/(n b))^2.
double gcv_criterion(const Sample& sample, const KernelSpec& spec, double bandwidth);

/// Candidate minimizing the GCV criterion; ties break toward the smaller
/// bandwidth. Throws AllCandidatesSingular when no candidate fits.
double gcv_bandwidth(const Sample& sample, const KernelSpec& spec,
                     const std::vector<double>& grid);

} // namespace curveshift
