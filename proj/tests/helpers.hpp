#pragma once

#include "curveshift/pipeline.hpp"
#include "curveshift/rng.hpp"
#include "curveshift/sample.hpp"
#include "curveshift/simulation.hpp"

#include <cmath>
#include <vector>

namespace testutil {

inline constexpr double kPi = 3.14159265358979323846;

/// Noise-free responses m(i/n), i = 1..n.
inline std::vector<double> noiseless(const std::function<double(double)>& m,
                                     std::size_t n) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = m(static_cast<double>(i + 1) / static_cast<double>(n));
    }
    return y;
}

inline curveshift::Sample noiseless_sample(const std::function<double(double)>& m,
                                           std::size_t n) {
    return curveshift::make_sample(noiseless(m, n), curveshift::Orientation::Convex);
}

/// Responses m(i/n) + e_i with the given error model.
inline curveshift::Sample noisy_sample(const std::function<double(double)>& m,
                                       std::size_t n,
                                       const curveshift::ErrorModel& model,
                                       curveshift::Rng& rng) {
    auto e = curveshift::generate_errors(model, n, rng);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = m(static_cast<double>(i + 1) / static_cast<double>(n)) + e[i];
    }
    return curveshift::make_sample(std::move(y), curveshift::Orientation::Convex);
}

/// Two-sample Kolmogorov-Smirnov p-value (asymptotic).
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i; else ++j;
        const double fa = static_cast<double>(i) / na;
        const double fb = static_cast<double>(j) / nb;
        d = std::max(d, std::abs(fa - fb));
    }
    const double en = std::sqrt(na * nb / (na + nb));
    const double lambda = (en + 0.12 + 0.11 / en) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        p += sign * 2.0 * std::exp(-2.0 * lambda * lambda * k * k);
        sign = -sign;
    }
    return std::clamp(p, 0.0, 1.0);
}

} // namespace testutil
