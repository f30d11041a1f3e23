#include "curveshift/simulation.hpp"

#include "curveshift/error.hpp"
#include "curveshift/parallel.hpp"

#include <cmath>

namespace curveshift {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kStreamErrors1 = 0xE1;
constexpr std::uint64_t kStreamErrors2 = 0xE2;
constexpr std::uint64_t kStreamBootstrap = 0xB007;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(seed) ^ mix_seed(a + 0x8F1BBCDCULL) ^
                    mix_seed(b + 0x2545F491ULL));
}
} // namespace

ErrorModel ErrorModel::benchmark(int sample_index, double scale) {
    ErrorModel m;
    m.coefficient = [](double t) { return 0.6 * (t - 0.3) * (t - 0.3); };
    m.innovation = sample_index == 2 ? Innovation::ScaledStudentT5
                                     : Innovation::StandardNormal;
    m.innovation_scale = scale;
    return m;
}

ErrorModel ErrorModel::benchmark(int sample_index) {
    return benchmark(sample_index, kBenchmarkNoiseScale);
}

ErrorModel ErrorModel::iid_normal() {
    ErrorModel m;
    m.coefficient = [](double) { return 0.0; };
    m.innovation = Innovation::StandardNormal;
    m.burn_in = 0;
    return m;
}

ErrorModel ErrorModel::none() {
    ErrorModel m;
    m.coefficient = [](double) { return 0.0; };
    m.innovation = Innovation::Custom;
    m.custom_innovation = [](Rng&) { return 0.0; };
    m.burn_in = 0;
    return m;
}

std::vector<double> generate_errors(const ErrorModel& model, std::size_t n, Rng& rng) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    auto draw = [&](Rng& r) -> double {
        switch (model.innovation) {
        case ErrorModel::Innovation::StandardNormal:
            return model.innovation_scale * r.normal();
        case ErrorModel::Innovation::ScaledStudentT5:
            return model.innovation_scale * r.student_t5() / std::sqrt(5.0 / 3.0);
        case ErrorModel::Innovation::Custom: return model.custom_innovation(r);
        }
        return 0.0;
    };
    double e = 0.0;
    const double a0 = model.coefficient(0.0);
    for (std::size_t k = 0; k < model.burn_in; ++k) e = a0 * e + draw(rng);
    std::vector<double> out(n);
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        e = model.coefficient(static_cast<double>(i + 1) / nd) * e + draw(rng);
        out[i] = e;
    }
    return out;
}

RegressionPair regression_pair_from_string(const std::string& name) {
    if (name == "exA") return RegressionPair::ExA;
    if (name == "exB") return RegressionPair::ExB;
    if (name == "exC") return RegressionPair::ExC;
    if (name == "exD") return RegressionPair::ExD;
    throw Error(ErrorCode::InvalidArgument, "unknown scenario '" + name + "'");
}

const char* regression_pair_name(RegressionPair pair) {
    switch (pair) {
    case RegressionPair::ExA: return "exA";
    case RegressionPair::ExB: return "exB";
    case RegressionPair::ExC: return "exC";
    case RegressionPair::ExD: return "exD";
    case RegressionPair::Custom: return "custom";
    }
    return "?";
}

CurvePair curve_pair(RegressionPair pair) {
    CurvePair p;
    switch (pair) {
    case RegressionPair::ExA:
        p.m1 = [](double x) { return (x - 0.4) * (x - 0.4); };
        p.m2 = [](double x) { return (x - 0.3) * (x - 0.3) - 0.2; };
        p.m1_prime = [](double x) { return 2.0 * (x - 0.4); };
        p.m2_prime = [](double x) { return 2.0 * (x - 0.3); };
        p.m1_pp = [](double) { return 2.0; };
        p.m2_pp = [](double) { return 2.0; };
        break;
    case RegressionPair::ExB:
        p.m1 = [](double x) { return std::sin(-kPi * x); };
        p.m2 = [](double x) { return std::sin(-kPi * (x + 0.1)) + 0.25; };
        p.m1_prime = [](double x) { return -kPi * std::cos(kPi * x); };
        p.m2_prime = [](double x) { return -kPi * std::cos(kPi * (x + 0.1)); };
        p.m1_pp = [](double x) { return kPi * kPi * std::sin(kPi * x); };
        p.m2_pp = [](double x) { return kPi * kPi * std::sin(kPi * (x + 0.1)); };
        break;
    case RegressionPair::ExC:
        p.m1 = [](double x) { return (x - 0.4) * (x - 0.4); };
        p.m2 = [](double x) { return x * x * x; };
        p.m1_prime = [](double x) { return 2.0 * (x - 0.4); };
        p.m2_prime = [](double x) { return 3.0 * x * x; };
        p.m1_pp = [](double) { return 2.0; };
        p.m2_pp = [](double x) { return 6.0 * x; };
        break;
    case RegressionPair::ExD:
        p.m1 = [](double x) { return std::sin(-kPi * x); };
        p.m2 = [](double x) { return -std::cos(kPi * x); };
        p.m1_prime = [](double x) { return -kPi * std::cos(kPi * x); };
        p.m2_prime = [](double x) { return kPi * std::sin(kPi * x); };
        p.m1_pp = [](double x) { return kPi * kPi * std::sin(kPi * x); };
        p.m2_pp = [](double x) { return kPi * kPi * std::cos(kPi * x); };
        break;
    case RegressionPair::Custom:
        throw Error(ErrorCode::InvalidArgument, "custom pair has no preset curves");
    }
    return p;
}

ScenarioResult run_scenario(const ScenarioSpec& spec, std::uint64_t seed,
                            unsigned threads) {
    if (spec.runs < 1) throw Error(ErrorCode::InvalidArgument, "runs must be >= 1");
    if (spec.n < 50) throw Error(ErrorCode::InvalidArgument, "n must be >= 50");
    if (spec.alphas.empty()) {
        throw Error(ErrorCode::InvalidArgument, "need at least one alpha");
    }
    const CurvePair curves =
        spec.pair == RegressionPair::Custom ? spec.custom : curve_pair(spec.pair);

    ScenarioResult result;
    result.alphas = spec.alphas;
    result.diagnostics.resize(spec.runs);

    const double nd = static_cast<double>(spec.n);
    parallel_for(spec.runs, [&](std::size_t run) {
        RunDiagnostics diag;
        diag.run = run;
        diag.rejections.assign(spec.alphas.size(), false);
        try {
            Rng rng1 = Rng::derive(seed, run, kStreamErrors1);
            Rng rng2 = Rng::derive(seed, run, kStreamErrors2);
            const std::vector<double> e1 = generate_errors(spec.error1, spec.n, rng1);
            const std::vector<double> e2 = generate_errors(spec.error2, spec.n, rng2);
            std::vector<double> y1(spec.n), y2(spec.n);
            for (std::size_t i = 0; i < spec.n; ++i) {
                const double t = static_cast<double>(i + 1) / nd;
                y1[i] = curves.m1(t) + e1[i];
                y2[i] = curves.m2(t) + e2[i];
            }
            const Sample s1 = make_sample(std::move(y1), Orientation::Convex);
            const Sample s2 = make_sample(std::move(y2), Orientation::Convex);

            PipelineConfig pc = spec.pipeline;
            pc.B = spec.B;
            pc.alpha = spec.alphas.front();
            pc.seed = derive_seed(seed, run, kStreamBootstrap);
            pc.threads = 1;
            const PipelineResult res = run_pipeline(s1, s2, pc);

            diag.T = res.stat.value;
            diag.p_value = res.boot.p_value;
            diag.c_hat = res.shift.c_hat;
            diag.d_hat = res.shift.d_hat;
            diag.swapped = res.shift.swapped;
            for (std::size_t a = 0; a < spec.alphas.size(); ++a) {
                diag.rejections[a] = res.boot.rejects(res.stat.value, spec.alphas[a]);
            }
        } catch (const Error& e) {
            diag.error = error_code_name(e.code());
        }
        result.diagnostics[run] = std::move(diag);
    }, threads);

    result.rejection_rates.assign(spec.alphas.size(), 0.0);
    result.mc_std_errors.assign(spec.alphas.size(), 0.0);
    for (const auto& diag : result.diagnostics) {
        if (!diag.error.empty()) {
            ++result.failures;
            continue;
        }
        ++result.successes;
        for (std::size_t a = 0; a < spec.alphas.size(); ++a) {
            if (diag.rejections[a]) result.rejection_rates[a] += 1.0;
        }
    }
    if (result.successes > 0) {
        const double denom = static_cast<double>(result.successes);
        for (std::size_t a = 0; a < spec.alphas.size(); ++a) {
            const double r = result.rejection_rates[a] / denom;
            result.rejection_rates[a] = r;
            result.mc_std_errors[a] = std::sqrt(r * (1.0 - r) / denom);
        }
    }
    return result;
}

CurvePair local_alternative_pair(const CurvePair& base,
                                 const std::function<double(double)>& g, double rho) {
    // inverse slope of curve 2 = inverse slope of curve 1 minus the
    // integrated perturbation, then invert and integrate back
    const double a0 = base.m1_prime(0.0);
    const double a1 = base.m1_prime(1.0);
    auto inv1 = [base, a0, a1](double v) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (base.m1_prime(mid) < v) lo = mid; else hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    auto inv2 = [inv1, g, rho, a0](double v) {
        const double pert = trapezoid(g, a0, v, 257);
        return inv1(v) - rho * pert;
    };
    auto m2_prime = [inv2, a0, a1](double u) {
        double lo = a0 - 1.0, hi = a1 + 1.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (inv2(mid) < u) lo = mid; else hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    CurvePair out;
    out.m1 = base.m1;
    out.m1_prime = base.m1_prime;
    out.m1_pp = base.m1_pp;
    out.m2_prime = m2_prime;
    out.m2 = [base, m2_prime](double x) {
        return base.m1(0.0) + trapezoid(m2_prime, 0.0, x, 257);
    };
    out.m2_pp = [m2_prime](double x) {
        const double h = 1e-4;
        const double lo = std::max(0.0, x - h), hi = std::min(1.0, x + h);
        return (m2_prime(hi) - m2_prime(lo)) / (hi - lo);
    };
    return out;
}

} // namespace curveshift
