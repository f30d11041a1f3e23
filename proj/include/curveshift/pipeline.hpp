#pragma once

#include "curveshift/bootstrap.hpp"
#include "curveshift/lrv.hpp"
#include "curveshift/sample.hpp"
#include "curveshift/shift.hpp"
#include "curveshift/smoothing.hpp"
#include "curveshift/test_statistic.hpp"

#include <cstdint>
#include <optional>

namespace curveshift {

/// Effective settings for one full test run. Unset optionals fall back to
/// the documented rules: GCV bandwidths, N = max(n1, n2), h_d = n^{-1/3},
/// LRV block ceil(n^{1/3}) and bandwidth n^{-1/5}.
struct PipelineConfig {
    KernelChoice kernel = KernelChoice::Epanechnikov;
    std::optional<double> bandwidth1;
    std::optional<double> bandwidth2;
    std::vector<double> gcv_grid; // empty -> default grid
    std::optional<std::size_t> N;
    std::optional<double> hd1;
    std::optional<double> hd2;
    double hd_scale = 1.0;    // h_d = hd_scale * n^{-hd_exponent}
    double hd_exponent = 1.0 / 3.0;
    double eta = 0.01;
    std::size_t L = 1000;     // device points
    std::size_t M = 1000;     // statistic quadrature nodes
    std::size_t shift_grid = 512;
    std::size_t cache_nodes = 2000;
    std::optional<std::size_t> lrv_m;
    std::optional<double> lrv_tau;
    bool lrv_detrend = false; // estimate the LRV from regression residuals
    std::size_t B = 500;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::size_t kernel_quad = 512;
};

struct PipelineResult {
    std::size_t n1 = 0, n2 = 0;
    double b1 = 0.0, b2 = 0.0;
    double hd1 = 0.0, hd2 = 0.0;
    std::size_t N = 0;
    std::size_t lrv_m = 0;
    double lrv_tau = 0.0;
    ShiftEstimate shift;    // internal (post-swap) order
    Window window;
    TestStatistic stat;
    BootstrapResult boot;
    double device_max_abs_diff = 0.0;
    std::size_t device_points = 0;
    bool inputs_negated = false; // concave orientation applied at ingestion

    /// Shift mapped back to the order the samples were supplied in.
    double c_hat_input_order() const { return shift.swapped ? -shift.c_hat : shift.c_hat; }
    double d_hat_input_order() const {
        double d = shift.swapped ? -shift.d_hat : shift.d_hat;
        return inputs_negated ? -d : d;
    }
};

/// Full test: bandwidths, fits, densities, shift, statistic, LRV,
/// bootstrap. Deterministic given config.seed.
PipelineResult run_pipeline(const Sample& s1, const Sample& s2,
                            const PipelineConfig& config);

} // namespace curveshift
