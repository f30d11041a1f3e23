#include "curveshift/shift.hpp"

#include "curveshift/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace curveshift {

DensityEstimate rearrangement_density(const CurveEstimate& curve, std::size_t N,
                                      double h_d, const KernelSpec& spec) {
    if (!(h_d > 0.0)) throw Error(ErrorCode::InvalidArgument, "h_d must be positive");
    if (N < 10) throw Error(ErrorCode::InvalidArgument, "N must be >= 10");

    DensityEstimate d;
    d.h_ = h_d;
    d.kd_ = spec.density;
    d.atoms_.resize(N);
    const double Nd = static_cast<double>(N);
    for (std::size_t i = 0; i < N; ++i) {
        d.atoms_[i] = curve.derivative(static_cast<double>(i + 1) / Nd);
    }
    d.deriv_at_zero_ = curve.derivative(0.0);

    // grid points inside [b, 1-b]; outside them the derivative is an
    // extension-rule constant
    const double b = curve.bandwidth();
    double lo_idx = std::ceil(Nd * b) - 1.0;
    double hi_idx = std::floor(Nd * (1.0 - b)) - 1.0;
    std::size_t begin = lo_idx <= 0.0 ? 0 : static_cast<std::size_t>(lo_idx);
    std::size_t end = hi_idx >= static_cast<double>(N - 1)
                          ? N
                          : static_cast<std::size_t>(hi_idx) + 1;
    if (begin >= end) { // pathological bandwidth; fall back to the full grid
        begin = 0;
        end = N;
    }
    d.band_begin_ = begin;
    d.band_end_ = end;
    double blo = std::numeric_limits<double>::infinity();
    double bhi = -blo;
    for (std::size_t i = begin; i < end; ++i) {
        if (d.atoms_[i] < blo) { blo = d.atoms_[i]; d.band_argmin_ = i; }
        if (d.atoms_[i] > bhi) { bhi = d.atoms_[i]; d.band_argmax_ = i; }
    }
    d.band_lo_ = blo;
    d.band_hi_ = bhi;
    return d;
}

double DensityEstimate::evaluate(double t) const {
    const double inv = 1.0 / (static_cast<double>(atoms_.size()) * h_);
    double sum = 0.0;
    for (double v : atoms_) {
        const double u = (v - t) / h_;
        if (u >= -1.0 && u <= 1.0) sum += kd_(u);
    }
    return sum * inv;
}

double DensityEstimate::comparison_value(double t) const {
    const double inv = 1.0 / (static_cast<double>(atoms_.size()) * h_);
    const double mlo = 2.0 * band_lo_ - t; // mirror images of the query
    const double mhi = 2.0 * band_hi_ - t;
    double sum = 0.0;
    for (std::size_t i = band_begin_; i < band_end_; ++i) {
        const double v = atoms_[i];
        double u = (v - t) / h_;
        if (u >= -1.0 && u <= 1.0) sum += kd_(u);
        u = (v - mlo) / h_;
        if (u >= -1.0 && u <= 1.0) sum += kd_(u);
        u = (v - mhi) / h_;
        if (u >= -1.0 && u <= 1.0) sum += kd_(u);
    }
    return sum * inv;
}

double DensityEstimate::support_lo() const {
    return *std::min_element(atoms_.begin(), atoms_.end()) - h_;
}

double DensityEstimate::support_hi() const {
    return *std::max_element(atoms_.begin(), atoms_.end()) + h_;
}

double integrate_density(const DensityEstimate& density, double lower, double x,
                         std::size_t grid) {
    if (lower > x) throw Error(ErrorCode::InvalidArgument, "lower > x");
    if (grid < 100) throw Error(ErrorCode::InvalidArgument, "grid must be >= 100");
    return trapezoid([&density](double t) { return density.evaluate(t); },
                     lower, x, grid);
}

CumulativeDensity::CumulativeDensity(const DensityEstimate& density, std::size_t nodes) {
    if (nodes < 2) throw Error(ErrorCode::InvalidArgument, "cache needs >= 2 nodes");
    const double lo = density.support_lo();
    const double hi = density.support_hi();
    grid_.resize(nodes);
    cum_.resize(nodes);
    const double dt = (hi - lo) / static_cast<double>(nodes - 1);
    double prev = density.evaluate(lo);
    grid_[0] = lo;
    cum_[0] = 0.0;
    for (std::size_t k = 1; k < nodes; ++k) {
        const double t = lo + static_cast<double>(k) * dt;
        const double cur = density.evaluate(t);
        grid_[k] = t;
        cum_[k] = cum_[k - 1] + 0.5 * (prev + cur) * dt;
        prev = cur;
    }
    base_ = mass_below(density.source_derivative_at_zero());
}

double CumulativeDensity::mass_below(double x) const {
    if (x <= grid_.front()) return 0.0;
    if (x >= grid_.back()) return cum_.back();
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - grid_.begin());
    const double t0 = grid_[k - 1], t1 = grid_[k];
    const double w = (x - t0) / (t1 - t0);
    return cum_[k - 1] + w * (cum_[k] - cum_[k - 1]);
}

double CumulativeDensity::value(double x) const { return mass_below(x) - base_; }

namespace {

struct ShiftInternals {
    double c_prelim = 0.0;
    double c_hat = 0.0;
};

// Arguments within one density bandwidth of a clamp value see a distorted
// cumulative (the boundary-extension rule piles mass exactly there), so
// the refinement skips them.
bool near_clamp(double v, const DensityEstimate& d) {
    return std::abs(v - d.comparison_lo()) < d.bandwidth() ||
           std::abs(v - d.comparison_hi()) < d.bandwidth();
}

// Averages g2(m1'(u)) - g1(m1'(u)) over u in [0, 1 - c_prelim]. The second
// term plays the role of u itself; estimating it through the same
// machinery cancels the mass the boundary-extension rule piles at the
// clamped derivative values.
ShiftInternals refine_shift(const CurveEstimate& c1, const CumulativeDensity& g1,
                            const CumulativeDensity& g2, const DensityEstimate& d1,
                            const DensityEstimate& d2, double c_prelim,
                            std::size_t grid) {
    ShiftInternals out;
    out.c_prelim = c_prelim;
    const double upper = 1.0 - c_prelim;
    const double dt = upper / static_cast<double>(grid - 1);
    double sum = 0.0, sum_all = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < grid; ++k) {
        const double u = static_cast<double>(k) * dt;
        const double v = c1.derivative(u);
        const double integrand = g2.value(v) - g1.value(v);
        sum_all += integrand;
        if (near_clamp(v, d1) || near_clamp(v, d2)) continue;
        sum += integrand;
        ++used;
    }
    out.c_hat = used >= 2 ? sum / static_cast<double>(used)
                          : sum_all / static_cast<double>(grid);
    return out;
}

} // namespace

ShiftEstimate estimate_shift(const CurveEstimate& curve1, const CurveEstimate& curve2,
                             const DensityEstimate& dens1, const DensityEstimate& dens2,
                             double eta, std::size_t grid, std::size_t cache_nodes) {
    if (!(eta > 0.0)) throw Error(ErrorCode::InvalidArgument, "eta must be positive");
    if (grid < 2) throw Error(ErrorCode::InvalidArgument, "grid must be >= 2");

    CumulativeDensity g1(dens1, cache_nodes);
    CumulativeDensity g2(dens2, cache_nodes);

    bool swapped = false;
    const CurveEstimate* c1 = &curve1;
    const CurveEstimate* c2 = &curve2;
    const DensityEstimate* d1 = &dens1;
    const DensityEstimate* d2 = &dens2;
    const CumulativeDensity* gg1 = &g1;
    const CumulativeDensity* gg2 = &g2;

    // Preliminary shift for both orientations; the valid one is positive.
    // Comparing the two is robust when the true shift is near zero and
    // the one-sided sign carries only boundary-pile mass.
    const double prelim_fwd = g2.value(curve1.derivative(0.0));
    const double prelim_rev = g1.value(curve2.derivative(0.0));
    double c_prelim = prelim_fwd;
    if (prelim_rev > prelim_fwd) {
        swapped = true;
        std::swap(c1, c2);
        std::swap(d1, d2);
        std::swap(gg1, gg2);
        c_prelim = prelim_rev;
    }
    c_prelim = std::max(c_prelim, 0.0);
    if (c_prelim > 0.99) {
        throw Error(ErrorCode::ShiftOutOfRange,
                    "preliminary shift " + std::to_string(c_prelim) +
                        " leaves no averaging range (derivative ranges barely overlap)");
    }

    const ShiftInternals ref =
        refine_shift(*c1, *gg1, *gg2, *d1, *d2, c_prelim, grid);

    ShiftEstimate est;
    est.swapped = swapped;
    est.eta = eta;
    est.c_prelim = ref.c_prelim;
    est.c_hat = ref.c_hat;
    const double c_eval = std::clamp(ref.c_hat, 0.0, 1.0);
    est.d_hat = c1->level(0.0) - c2->level(c_eval);
    est.a_hat = c1->derivative(0.0);
    est.b_hat = c1->derivative(std::clamp(1.0 - ref.c_hat, 0.0, 1.0));
    if (!(est.b_hat - est.a_hat > 2.0 * eta)) {
        throw Error(ErrorCode::DegenerateWindow,
                    "derivative range [" + std::to_string(est.a_hat) + ", " +
                        std::to_string(est.b_hat) + "] too narrow for eta=" +
                        std::to_string(eta));
    }
    return est;
}

Window comparison_window(const ShiftEstimate& shift, const DensityEstimate& dens1,
                         const DensityEstimate& dens2) {
    Window w;
    w.lo = std::max({shift.a_hat + shift.eta, dens1.comparison_lo(),
                     dens2.comparison_lo()});
    w.hi = std::min({shift.b_hat - shift.eta, dens1.comparison_hi(),
                     dens2.comparison_hi()});
    if (!(w.lo < w.hi)) {
        throw Error(ErrorCode::DegenerateWindow,
                    "comparison window empty: [" + std::to_string(w.lo) + ", " +
                        std::to_string(w.hi) + "]");
    }
    return w;
}

double DevicePointSet::max_abs_diff() const {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, std::abs(p.second));
    return m;
}

DevicePointSet device_point_set(const DensityEstimate& dens1,
                                const DensityEstimate& dens2,
                                const ShiftEstimate& shift, std::size_t L) {
    if (L < 2) throw Error(ErrorCode::InvalidArgument, "L must be >= 2");
    DevicePointSet set;
    set.window = comparison_window(shift, dens1, dens2);
    const double eps = (set.window.hi - set.window.lo) * 1e-12;
    const double lo = set.window.lo + eps;
    const double hi = set.window.hi - eps;
    const double dt = (hi - lo) / static_cast<double>(L - 1);
    set.points.reserve(L);
    for (std::size_t l = 0; l < L; ++l) {
        const double t = lo + static_cast<double>(l) * dt;
        set.points.emplace_back(t, dens1.comparison_value(t) - dens2.comparison_value(t));
    }
    return set;
}

} // namespace curveshift
