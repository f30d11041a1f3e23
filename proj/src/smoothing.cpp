#include "curveshift/smoothing.hpp"

#include "curveshift/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace curveshift {

Sample make_sample(std::vector<double> responses, Orientation orientation) {
    if (responses.size() < 10) {
        throw Error(ErrorCode::TooFewRows,
                    "need at least 10 observations, got " + std::to_string(responses.size()));
    }
    for (double y : responses) {
        if (!std::isfinite(y)) {
            throw Error(ErrorCode::InvalidArgument, "non-finite response value");
        }
    }
    if (orientation == Orientation::Concave) {
        for (double& y : responses) y = -y;
    }
    Sample s;
    s.responses = std::move(responses);
    s.orientation = orientation;
    return s;
}

namespace {

struct LocalFit {
    double level = 0.0;
    double slope_scaled = 0.0; // slope on the (x - t)/b covariate
};

struct FitContext {
    std::vector<double> y;
    std::size_t n = 0;
    double b = 0.0;
    std::function<double(double)> kernel;

    LocalFit solve(double t) const {
        // window of design indices with |i/n - t| <= b
        const double nd = static_cast<double>(n);
        std::size_t i_lo = 0, i_hi = n; // [i_lo, i_hi), 0-based
        {
            const double lo = (t - b) * nd - 1.0;
            const double hi = (t + b) * nd - 1.0;
            i_lo = lo <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(lo));
            i_hi = hi >= static_cast<double>(n - 1)
                       ? n
                       : static_cast<std::size_t>(std::floor(hi)) + 1;
        }
        double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
        for (std::size_t i = i_lo; i < i_hi; ++i) {
            const double x = (static_cast<double>(i + 1) / nd - t) / b;
            const double w = kernel(x);
            if (w == 0.0) continue;
            s0 += w;
            s1 += w * x;
            s2 += w * x * x;
            t0 += w * y[i];
            t1 += w * x * y[i];
        }
        const double ridge = 1e-11 * (s0 + s2);
        const double a00 = s0 + ridge;
        const double a11 = s2 + ridge;
        const double det = a00 * a11 - s1 * s1;
        const double tr = a00 + a11;
        const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
        const double lam_max = 0.5 * (tr + disc);
        const double lam_min = 0.5 * (tr - disc);
        if (!(lam_min > 0.0) || lam_max / lam_min > 1e12) {
            throw Error(ErrorCode::SingularDesign,
                        "local normal matrix ill-conditioned at t=" + std::to_string(t) +
                            " (bandwidth too small)");
        }
        LocalFit f;
        f.level = (a11 * t0 - s1 * t1) / det;
        f.slope_scaled = (a00 * t1 - s1 * t0) / det;
        return f;
    }
};

} // namespace

struct CurveEstimate::Impl {
    // exactly one of ctx / analytic is active
    std::shared_ptr<const FitContext> ctx;
    LocalFit left_fit, right_fit; // at t = b and t = 1 - b
    std::function<double(double)> analytic_level;
    std::function<double(double)> analytic_deriv;
    double bandwidth = 0.0;

    double level_at(double t) const {
        if (analytic_level) return analytic_level(t);
        const double b = bandwidth;
        if (t < b) return left_fit.level + (t - b) * left_fit.slope_scaled / b;
        if (t > 1.0 - b) return right_fit.level + (t - (1.0 - b)) * right_fit.slope_scaled / b;
        return ctx->solve(t).level;
    }

    double deriv_at(double t) const {
        if (analytic_deriv) return analytic_deriv(t);
        const double b = bandwidth;
        if (t <= b) return left_fit.slope_scaled / b;
        if (t >= 1.0 - b) return right_fit.slope_scaled / b;
        return ctx->solve(t).slope_scaled / b;
    }
};

double CurveEstimate::level(double t) const { return impl_->level_at(t); }
double CurveEstimate::derivative(double t) const { return impl_->deriv_at(t); }
double CurveEstimate::bandwidth() const { return impl_->bandwidth; }

CurveEstimate CurveEstimate::analytic(std::function<double(double)> level,
                                      std::function<double(double)> derivative,
                                      double bandwidth) {
    auto impl = std::make_shared<Impl>();
    impl->analytic_level = std::move(level);
    impl->analytic_deriv = std::move(derivative);
    impl->bandwidth = bandwidth;
    return CurveEstimate(std::move(impl));
}

CurveEstimate fit_local_linear(const Sample& sample, double bandwidth,
                               const KernelSpec& spec) {
    const std::size_t n = sample.size();
    if (!(bandwidth > 1.0 / static_cast<double>(n)) || !(bandwidth < 0.5)) {
        throw Error(ErrorCode::InvalidArgument,
                    "bandwidth must lie in (1/n, 0.5), got " + std::to_string(bandwidth));
    }
    auto ctx = std::make_shared<FitContext>();
    ctx->y = sample.responses;
    ctx->n = n;
    ctx->b = bandwidth;
    ctx->kernel = spec.base;

    auto impl = std::make_shared<CurveEstimate::Impl>();
    impl->ctx = ctx;
    impl->bandwidth = bandwidth;
    impl->left_fit = ctx->solve(bandwidth);
    impl->right_fit = ctx->solve(1.0 - bandwidth);
    return CurveEstimate(std::move(impl));
}

std::vector<double> default_gcv_grid(std::size_t n, std::size_t count) {
    const double rate = std::pow(static_cast<double>(n), -0.2);
    const double lo = 0.5 * rate;
    const double hi = std::min(0.49, 2.0 * rate);
    std::vector<double> grid;
    grid.reserve(count);
    if (count == 1 || lo >= hi) {
        grid.push_back(std::min(lo, hi));
        return grid;
    }
    const double step = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) {
        grid.push_back(lo * std::exp(step * static_cast<double>(k)));
    }
    return grid;
}

double gcv_criterion(const Sample& sample, const KernelSpec& spec, double bandwidth) {
    const std::size_t n = sample.size();
    const double denom_root =
        1.0 - spec.base(0.0) / (static_cast<double>(n) * bandwidth);
    if (!(denom_root > 0.0)) {
        throw Error(ErrorCode::SingularDesign, "GCV denominator nonpositive");
    }
    const CurveEstimate fit = fit_local_linear(sample, bandwidth, spec);
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = sample.responses[i] - fit.level(sample.design_point(i));
        rss += r * r;
    }
    return (rss / static_cast<double>(n)) / (denom_root * denom_root);
}

double gcv_bandwidth(const Sample& sample, const KernelSpec& spec,
                     const std::vector<double>& grid) {
    if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty bandwidth grid");
    std::vector<double> sorted = grid;
    std::sort(sorted.begin(), sorted.end());
    double best_b = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    bool any = false;
    for (double b : sorted) {
        double score;
        try {
            score = gcv_criterion(sample, spec, b);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::SingularDesign) continue;
            throw;
        }
        if (!any || score < best_score) {
            any = true;
            best_score = score;
            best_b = b;
        }
    }
    if (!any) {
        throw Error(ErrorCode::AllCandidatesSingular, "every GCV candidate failed");
    }
    return best_b;
}

} // namespace curveshift
