#pragma once

#include "curveshift/kernels.hpp"
#include "curveshift/smoothing.hpp"

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

namespace curveshift {

/// Kernel density of the estimated derivative values on the grid i/N,
/// i = 1..N; estimates the derivative of the inverse of the curve's
/// derivative. evaluate() is the plain estimator (unit mass).
///
/// comparison_value() is the variant used wherever two densities are
/// compared pointwise (graphical device, test statistic, bootstrap): it
/// drops grid points that fall in the derivative's boundary-extension
/// zones (their values are artifacts of the clamping rule, piled at the
/// clamp value) and reflects the kernel at the remaining value range so
/// the estimate carries no roll-off inside that range.
class DensityEstimate {
public:
    double evaluate(double t) const;
    double comparison_value(double t) const;

    std::size_t grid_size() const { return atoms_.size(); }
    double bandwidth() const { return h_; }

    /// Support of evaluate(): [min atom - h, max atom + h].
    double support_lo() const;
    double support_hi() const;

    /// Value range of the interior (non-clamped) grid points.
    double comparison_lo() const { return band_lo_; }
    double comparison_hi() const { return band_hi_; }

    /// Derivative of the source curve at 0 (lower limit used when the
    /// density is integrated into a cumulative).
    double source_derivative_at_zero() const { return deriv_at_zero_; }

    const std::vector<double>& atoms() const { return atoms_; }
    std::size_t band_begin() const { return band_begin_; }
    std::size_t band_end() const { return band_end_; }

    /// Indices (within [band_begin, band_end)) of the extreme atoms; the
    /// reflection boundaries track these values.
    std::size_t band_argmin() const { return band_argmin_; }
    std::size_t band_argmax() const { return band_argmax_; }

private:
    friend DensityEstimate rearrangement_density(const CurveEstimate&, std::size_t,
                                                 double, const KernelSpec&);
    std::vector<double> atoms_;      // derivative values at i/N
    std::size_t band_begin_ = 0;     // [band_begin_, band_end_): i/N inside [b, 1-b]
    std::size_t band_end_ = 0;
    std::size_t band_argmin_ = 0, band_argmax_ = 0;
    double band_lo_ = 0.0, band_hi_ = 0.0;
    double h_ = 0.0;
    double deriv_at_zero_ = 0.0;
    std::function<double(double)> kd_;
};

/// Builds the density from N evaluations of the curve's derivative.
/// Requires h_d > 0 and N >= 50.
DensityEstimate rearrangement_density(const CurveEstimate& curve, std::size_t N,
                                      double h_d, const KernelSpec& spec);

/// Trapezoid integral of evaluate() from lower to x on `grid` nodes
/// (grid >= 100). Nondecreasing in x; zero at x == lower.
double integrate_density(const DensityEstimate& density, double lower, double x,
                         std::size_t grid);

/// Cached cumulative of a DensityEstimate: dense grid over the support
/// with linear interpolation between nodes; queries are clamped to the
/// grid range. value(x) integrates from the source curve's derivative
/// at zero, so it can be negative below that point.
class CumulativeDensity {
public:
    CumulativeDensity(const DensityEstimate& density, std::size_t nodes = 2000);
    double value(double x) const; // signed integral from source derivative at 0
    double mass_below(double x) const;

private:
    std::vector<double> grid_, cum_;
    double base_ = 0.0;
};

/// Horizontal/vertical shift estimates relating the two curves, in the
/// internal (possibly swapped) sample order.
struct ShiftEstimate {
    double c_prelim = 0.0; // preliminary shift used for the averaging range
    double c_hat = 0.0;    // horizontal shift (design axis)
    double d_hat = 0.0;    // vertical shift (response units)
    double a_hat = 0.0;    // first curve's derivative at 0
    double b_hat = 0.0;    // first curve's derivative at 1 - c_hat
    bool swapped = false;  // samples exchanged to make the preliminary shift >= 0
    double eta = 0.0;      // window margin
};

/// Estimate the shifts. When the preliminary shift comes out negative the
/// roles of the two samples are exchanged (recomputing on the other
/// density) and the flag records it; callers must reorder their own
/// per-sample data accordingly. Throws ShiftOutOfRange when the
/// preliminary shift reaches 1 (derivative ranges barely overlap) and
/// DegenerateWindow when b_hat - a_hat <= 2 eta.
ShiftEstimate estimate_shift(const CurveEstimate& curve1, const CurveEstimate& curve2,
                             const DensityEstimate& dens1, const DensityEstimate& dens2,
                             double eta, std::size_t grid = 512,
                             std::size_t cache_nodes = 2000);

struct Window {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

/// Interval over which the two densities are compared:
/// [a_hat + eta, b_hat - eta] intersected with both comparison ranges.
/// dens1/dens2 must already be in the shift's internal order.
/// Throws DegenerateWindow when empty.
Window comparison_window(const ShiftEstimate& shift, const DensityEstimate& dens1,
                         const DensityEstimate& dens2);

/// Points (t_l, f1(t_l) - f2(t_l)) on an equally spaced grid spanning the
/// comparison window.
struct DevicePointSet {
    std::vector<std::pair<double, double>> points;
    Window window;
    double max_abs_diff() const;
};

DevicePointSet device_point_set(const DensityEstimate& dens1,
                                const DensityEstimate& dens2,
                                const ShiftEstimate& shift, std::size_t L);

} // namespace curveshift
