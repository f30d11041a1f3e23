#include "curveshift/lrv.hpp"

#include "curveshift/error.hpp"

#include <algorithm>
#include <cmath>

namespace curveshift {

std::size_t default_block_size(std::size_t n) {
    // Half the n^{1/3} rule: block differences pick up a smooth-trend term
    // of order (trend slope * m / n)^2 * m / 2, which grows as m^3.
    const double m = std::ceil(0.5 * std::cbrt(static_cast<double>(n)));
    return std::max<std::size_t>(2, static_cast<std::size_t>(m));
}

double default_lrv_bandwidth(std::size_t n) {
    return std::pow(static_cast<double>(n), -0.2);
}

LrvEstimate estimate_lrv(const Sample& sample, std::size_t m, double tau,
                         const KernelSpec& spec) {
    const std::size_t n = sample.size();
    if (m < 2) throw Error(ErrorCode::InvalidArgument, "block size must be >= 2");
    if (4 * m > n) {
        throw Error(ErrorCode::BlockTooLarge,
                    "block size " + std::to_string(m) + " exceeds n/4");
    }
    if (!(tau > static_cast<double>(m) / static_cast<double>(n)) || !(tau < 0.5)) {
        throw Error(ErrorCode::InvalidArgument, "tau must lie in (m/n, 0.5)");
    }

    // prefix sums: P[k] = y_0 + ... + y_{k-1}
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + sample.responses[i];

    LrvEstimate est;
    est.m_ = m;
    est.tau_ = tau;
    est.kernel_ = spec.lrv;
    const double nd = static_cast<double>(n);
    const double md = static_cast<double>(m);
    // both blocks around position j (1-based) must fit: m <= j <= n - m
    for (std::size_t j = m; j + m <= n; ++j) {
        const double left = prefix[j] - prefix[j - m];   // y_{j-m+1} .. y_j
        const double right = prefix[j + m] - prefix[j];  // y_{j+1} .. y_{j+m}
        const double delta = (left - right) / md;
        est.points_.push_back(static_cast<double>(j) / nd);
        est.values_.push_back(md * delta * delta / 2.0);
    }
    est.t_lo_ = md / nd;
    est.t_hi_ = 1.0 - md / nd;
    return est;
}

double LrvEstimate::evaluate(double t) const {
    t = std::clamp(t, t_lo_, t_hi_);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < points_.size(); ++k) {
        const double u = (points_[k] - t) / tau_;
        if (u < -1.0 || u > 1.0) continue;
        const double w = kernel_(u);
        num += w * values_[k];
        den += w;
    }
    if (den <= 0.0) {
        // no block center inside the kernel window; take the nearest one
        std::size_t best = 0;
        double dist = std::abs(points_[0] - t);
        for (std::size_t k = 1; k < points_.size(); ++k) {
            const double dk = std::abs(points_[k] - t);
            if (dk < dist) { dist = dk; best = k; }
        }
        return values_[best];
    }
    return num / den;
}

} // namespace curveshift
