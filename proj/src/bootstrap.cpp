#include "curveshift/bootstrap.hpp"

#include "curveshift/error.hpp"
#include "curveshift/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace curveshift {

namespace {
constexpr std::uint64_t kStreamSample1 = 0x531;
constexpr std::uint64_t kStreamSample2 = 0x5332;
} // namespace

BootstrapPlan::BootstrapPlan(const DensityEstimate& dens1, const DensityEstimate& dens2,
                             const LrvEstimate& lrv1, const LrvEstimate& lrv2,
                             std::size_t n1, std::size_t n2, const ShiftEstimate& shift,
                             const BootstrapConfig& config, const KernelSpec& spec) {
    if (config.M < 100) throw Error(ErrorCode::InvalidArgument, "M must be >= 100");
    M_ = config.M;
    N_ = config.N;
    window_ = comparison_window(shift, dens1, dens2);

    grid_.resize(M_);
    quad_weights_.resize(M_);
    const double dt = (window_.hi - window_.lo) / static_cast<double>(M_ - 1);
    for (std::size_t k = 0; k < M_; ++k) {
        grid_[k] = window_.lo + static_cast<double>(k) * dt;
        quad_weights_[k] = (k == 0 || k + 1 == M_) ? 0.5 * dt : dt;
    }
    build_tables(s1_, dens1, lrv1, n1, config.b1, config.h1, spec);
    build_tables(s2_, dens2, lrv2, n2, config.b2, config.h2, spec);
}

void BootstrapPlan::build_tables(SampleTables& tab, const DensityEstimate& dens,
                                 const LrvEstimate& lrv, std::size_t n, double b,
                                 double h, const KernelSpec& spec) {
    tab.n = n;
    const std::size_t begin = dens.band_begin();
    const std::size_t end = dens.band_end();
    tab.R = end - begin;
    tab.norm = 1.0 / (static_cast<double>(n) * static_cast<double>(N_) * b * b * h * h);

    const double lo = dens.comparison_lo();
    const double hi = dens.comparison_hi();
    const auto& atoms = dens.atoms();

    // Gradient of the reflected comparison estimator with respect to the
    // atom values: direct and mirror kernel slopes per atom, plus the
    // boundary motion itself, which rides on the extreme atoms and
    // nearly cancels the mirror slopes there.
    tab.kd_matrix.assign(M_ * tab.R, 0.0);
    const std::size_t r_min = dens.band_argmin() - begin;
    const std::size_t r_max = dens.band_argmax() - begin;
    for (std::size_t k = 0; k < M_; ++k) {
        const double t = grid_[k];
        const double mlo = 2.0 * lo - t;
        const double mhi = 2.0 * hi - t;
        double* row = tab.kd_matrix.data() + k * tab.R;
        double mlo_total = 0.0, mhi_total = 0.0;
        for (std::size_t r = 0; r < tab.R; ++r) {
            const double v = atoms[begin + r];
            double sum = 0.0;
            double u = (v - t) / h;
            if (u >= -1.0 && u <= 1.0) sum += spec.density_deriv(u);
            u = (v - mlo) / h;
            if (u >= -1.0 && u <= 1.0) {
                const double kd = spec.density_deriv(u);
                sum += kd;
                mlo_total += kd;
            }
            u = (v - mhi) / h;
            if (u >= -1.0 && u <= 1.0) {
                const double kd = spec.density_deriv(u);
                sum += kd;
                mhi_total += kd;
            }
            row[r] = sum;
        }
        row[r_min] -= 2.0 * mlo_total;
        row[r_max] -= 2.0 * mhi_total;
    }

    // sparse band of equivalent-kernel weights: atom r contributes to
    // design point j when |j/n - i/N| <= b
    const double nd = static_cast<double>(n);
    const double Nd = static_cast<double>(N_);
    tab.sigma.resize(n);
    tab.band_start.resize(n);
    tab.band_len.resize(n);
    tab.band_offset.resize(n);
    std::size_t total = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = static_cast<double>(j + 1) / nd;
        tab.sigma[j] = std::sqrt(std::max(0.0, lrv.evaluate(x)));
        const double lo_idx = (x - b) * Nd - 1.0;
        const double hi_idx = (x + b) * Nd - 1.0;
        std::size_t i1 = lo_idx <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(lo_idx));
        std::size_t i2 = hi_idx >= static_cast<double>(N_ - 1)
                             ? N_ - 1
                             : static_cast<std::size_t>(std::floor(hi_idx));
        i1 = std::max(i1, begin);
        i2 = std::min(i2, end - 1);
        tab.band_offset[j] = total;
        if (i1 > i2) {
            tab.band_start[j] = 0;
            tab.band_len[j] = 0;
            continue;
        }
        tab.band_start[j] = i1 - begin;
        tab.band_len[j] = i2 - i1 + 1;
        total += tab.band_len[j];
    }
    tab.band_values.resize(total);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = static_cast<double>(j + 1) / nd;
        double* dst = tab.band_values.data() + tab.band_offset[j];
        for (std::size_t r = 0; r < tab.band_len[j]; ++r) {
            const std::size_t i = begin + tab.band_start[j] + r;
            const double u = (x - static_cast<double>(i + 1) / Nd) / b;
            dst[r] = equivalent_kernel(spec, u);
        }
    }
}

double BootstrapPlan::replicate(Rng& rng1, Rng& rng2) const {
    std::vector<double> c1(s1_.R, 0.0), c2(s2_.R, 0.0);
    const SampleTables* tabs[2] = {&s1_, &s2_};
    std::vector<double>* acc[2] = {&c1, &c2};
    Rng* rngs[2] = {&rng1, &rng2};
    for (int s = 0; s < 2; ++s) {
        const SampleTables& tab = *tabs[s];
        std::vector<double>& c = *acc[s];
        Rng& rng = *rngs[s];
        for (std::size_t j = 0; j < tab.n; ++j) {
            const double w = tab.sigma[j] * rng.normal();
            const double* vals = tab.band_values.data() + tab.band_offset[j];
            double* dst = c.data() + tab.band_start[j];
            const std::size_t len = tab.band_len[j];
            for (std::size_t r = 0; r < len; ++r) dst[r] += vals[r] * w;
        }
    }
    double total = 0.0;
    for (std::size_t k = 0; k < M_; ++k) {
        const double* row1 = s1_.kd_matrix.data() + k * s1_.R;
        const double* row2 = s2_.kd_matrix.data() + k * s2_.R;
        double xi1 = 0.0, xi2 = 0.0;
        for (std::size_t r = 0; r < s1_.R; ++r) xi1 += row1[r] * c1[r];
        for (std::size_t r = 0; r < s2_.R; ++r) xi2 += row2[r] * c2[r];
        const double u = s1_.norm * xi1 - s2_.norm * xi2;
        total += quad_weights_[k] * u * u;
    }
    return total;
}

double bootstrap_replicate(const CurveEstimate& curve1, const CurveEstimate& curve2,
                           const LrvEstimate& lrv1, const LrvEstimate& lrv2,
                           std::size_t n1, std::size_t n2, const ShiftEstimate& shift,
                           const BootstrapConfig& config, const KernelSpec& spec,
                           Rng& rng1, Rng& rng2) {
    const DensityEstimate d1 = rearrangement_density(curve1, config.N, config.h1, spec);
    const DensityEstimate d2 = rearrangement_density(curve2, config.N, config.h2, spec);
    BootstrapPlan plan(d1, d2, lrv1, lrv2, n1, n2, shift, config, spec);
    return plan.replicate(rng1, rng2);
}

bool BootstrapResult::rejects(double value, double alpha) const {
    const std::size_t idx =
        static_cast<std::size_t>(std::floor(static_cast<double>(B) * (1.0 - alpha)));
    if (idx == 0 || idx > B) return false;
    return value > draws[idx - 1];
}

BootstrapResult bootstrap_test(const TestStatistic& stat, std::size_t B, double alpha,
                               const BootstrapPlan& plan, std::uint64_t seed,
                               unsigned threads) {
    if (B < 100) throw Error(ErrorCode::InvalidArgument, "B must be >= 100");
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    }
    BootstrapResult result;
    result.B = B;
    result.alpha = alpha;
    result.seed = seed;
    result.draws.resize(B);
    parallel_for(B, [&](std::size_t k) {
        Rng r1 = Rng::derive(seed, k, kStreamSample1);
        Rng r2 = Rng::derive(seed, k, kStreamSample2);
        result.draws[k] = plan.replicate(r1, r2);
    }, threads);
    std::sort(result.draws.begin(), result.draws.end());

    const std::size_t below = static_cast<std::size_t>(
        std::upper_bound(result.draws.begin(), result.draws.end(), stat.value) -
        result.draws.begin());
    result.p_value = 1.0 - static_cast<double>(below) / static_cast<double>(B);
    result.reject = result.rejects(stat.value, alpha);
    return result;
}

} // namespace curveshift
