#include "curveshift/pipeline.hpp"

#include "curveshift/error.hpp"

#include <cmath>

namespace curveshift {

PipelineResult run_pipeline(const Sample& s1, const Sample& s2,
                            const PipelineConfig& config) {
    if (s1.negated() != s2.negated()) {
        throw Error(ErrorCode::InvalidArgument,
                    "both samples must share one orientation");
    }
    const KernelSpec spec = make_kernel_spec(config.kernel, config.kernel_quad);

    PipelineResult out;
    out.n1 = s1.size();
    out.n2 = s2.size();
    out.inputs_negated = s1.negated();

    out.b1 = config.bandwidth1
                 ? *config.bandwidth1
                 : gcv_bandwidth(s1, spec, config.gcv_grid.empty()
                                               ? default_gcv_grid(out.n1)
                                               : config.gcv_grid);
    out.b2 = config.bandwidth2
                 ? *config.bandwidth2
                 : gcv_bandwidth(s2, spec, config.gcv_grid.empty()
                                               ? default_gcv_grid(out.n2)
                                               : config.gcv_grid);

    CurveEstimate curve1 = fit_local_linear(s1, out.b1, spec);
    CurveEstimate curve2 = fit_local_linear(s2, out.b2, spec);

    out.N = config.N ? *config.N : std::max(out.n1, out.n2);
    auto hd_rule = [&](std::size_t n) {
        return config.hd_scale *
               std::pow(static_cast<double>(n), -config.hd_exponent);
    };
    out.hd1 = config.hd1 ? *config.hd1 : hd_rule(out.n1);
    out.hd2 = config.hd2 ? *config.hd2 : hd_rule(out.n2);

    DensityEstimate dens1 = rearrangement_density(curve1, out.N, out.hd1, spec);
    DensityEstimate dens2 = rearrangement_density(curve2, out.N, out.hd2, spec);

    out.shift = estimate_shift(curve1, curve2, dens1, dens2, config.eta,
                               config.shift_grid, config.cache_nodes);
    if (out.shift.swapped) {
        std::swap(curve1, curve2);
        std::swap(dens1, dens2);
        std::swap(out.n1, out.n2);
        std::swap(out.b1, out.b2);
        std::swap(out.hd1, out.hd2);
    }

    out.window = comparison_window(out.shift, dens1, dens2);
    out.stat = test_statistic(dens1, dens2, out.shift, config.M);

    const DevicePointSet device = device_point_set(dens1, dens2, out.shift, config.L);
    out.device_max_abs_diff = device.max_abs_diff();
    out.device_points = device.points.size();

    const Sample& first = out.shift.swapped ? s2 : s1;
    const Sample& second = out.shift.swapped ? s1 : s2;
    out.lrv_m = config.lrv_m ? *config.lrv_m : default_block_size(std::min(out.n1, out.n2));
    out.lrv_tau = config.lrv_tau ? *config.lrv_tau
                                 : default_lrv_bandwidth(std::min(out.n1, out.n2));
    // Optionally estimate the LRV from regression residuals: the raw
    // responses' block differences carry a trend term of order
    // (m'^2 m^3 / n^2) that can dominate the error variance when the noise
    // is small relative to the curve.
    auto residual_sample = [](const Sample& s, const CurveEstimate& curve) {
        std::vector<double> r(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            r[i] = s.responses[i] - curve.level(s.design_point(i));
        }
        Sample out_s;
        out_s.responses = std::move(r);
        out_s.orientation = Orientation::Convex;
        return out_s;
    };
    LrvEstimate lrv1 = config.lrv_detrend
                           ? estimate_lrv(residual_sample(first, curve1), out.lrv_m,
                                          out.lrv_tau, spec)
                           : estimate_lrv(first, out.lrv_m, out.lrv_tau, spec);
    LrvEstimate lrv2 = config.lrv_detrend
                           ? estimate_lrv(residual_sample(second, curve2), out.lrv_m,
                                          out.lrv_tau, spec)
                           : estimate_lrv(second, out.lrv_m, out.lrv_tau, spec);

    BootstrapConfig bc;
    bc.N = out.N;
    bc.h1 = out.hd1;
    bc.h2 = out.hd2;
    bc.b1 = out.b1;
    bc.b2 = out.b2;
    bc.M = config.M;
    BootstrapPlan plan(dens1, dens2, lrv1, lrv2, out.n1, out.n2, out.shift, bc, spec);
    out.boot = bootstrap_test(out.stat, config.B, config.alpha, plan, config.seed,
                              config.threads);
    return out;
}

} // namespace curveshift
