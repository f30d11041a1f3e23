#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "curveshift/error.hpp"
#include "curveshift/pipeline.hpp"
#include "curveshift/simulation.hpp"
#include "curveshift/test_statistic.hpp"
#include "helpers.hpp"

#include <cmath>

using namespace curveshift;

namespace {

const KernelSpec kSpec = make_kernel_spec(KernelChoice::Epanechnikov);

struct NoiselessCase {
    ShiftEstimate shift;
    DensityEstimate d1, d2;
};

NoiselessCase noiseless_case(RegressionPair pair, std::size_t n) {
    const CurvePair cp = curve_pair(pair);
    const Sample s1 = testutil::noiseless_sample(cp.m1, n);
    const Sample s2 = testutil::noiseless_sample(cp.m2, n);
    const double b1 = gcv_bandwidth(s1, kSpec, default_gcv_grid(n));
    const double b2 = gcv_bandwidth(s2, kSpec, default_gcv_grid(n));
    const CurveEstimate c1 = fit_local_linear(s1, b1, kSpec);
    const CurveEstimate c2 = fit_local_linear(s2, b2, kSpec);
    const double h = std::pow(static_cast<double>(n), -1.0 / 3.0);
    DensityEstimate d1 = rearrangement_density(c1, n, h, kSpec);
    DensityEstimate d2 = rearrangement_density(c2, n, h, kSpec);
    ShiftEstimate shift = estimate_shift(c1, c2, d1, d2, 0.01);
    if (shift.swapped) std::swap(d1, d2);
    return {shift, std::move(d1), std::move(d2)};
}

} // namespace

TEST_CASE("identical densities give exactly zero") {
    NoiselessCase c = noiseless_case(RegressionPair::ExA, 300);
    const TestStatistic t = test_statistic(c.d1, c.d1, c.shift, 500);
    CHECK(t.value == 0.0);
}

TEST_CASE("noiseless null pairs stay below 1e-3, alternatives above 1e-2") {
    for (auto pair : {RegressionPair::ExA, RegressionPair::ExB}) {
        NoiselessCase c = noiseless_case(pair, 500);
        CHECK(test_statistic(c.d1, c.d2, c.shift, 1000).value <= 1e-3);
    }
    for (auto pair : {RegressionPair::ExC, RegressionPair::ExD}) {
        NoiselessCase c = noiseless_case(pair, 500);
        CHECK(test_statistic(c.d1, c.d2, c.shift, 1000).value >= 0.01);
    }
}

TEST_CASE("statistic is symmetric in the two densities") {
    NoiselessCase c = noiseless_case(RegressionPair::ExC, 300);
    const double t12 = test_statistic(c.d1, c.d2, c.shift, 800).value;
    const double t21 = test_statistic(c.d2, c.d1, c.shift, 800).value;
    CHECK(t12 == doctest::Approx(t21).epsilon(1e-15));
}

TEST_CASE("enlarging the window never decreases the statistic") {
    NoiselessCase c = noiseless_case(RegressionPair::ExC, 300);
    ShiftEstimate wide = c.shift;
    wide.eta = c.shift.eta / 4.0;
    const double t_narrow = test_statistic(c.d1, c.d2, c.shift, 2000).value;
    const double t_wide = test_statistic(c.d1, c.d2, wide, 2000).value;
    CHECK(t_wide >= t_narrow - 1e-12);
}

TEST_CASE("statistic validation") {
    NoiselessCase c = noiseless_case(RegressionPair::ExA, 300);
    CHECK_THROWS_AS((void)test_statistic(c.d1, c.d2, c.shift, 50), Error);
}

TEST_CASE("asymptotic quantities vanish with the variance") {
    Window w{-0.5, 0.5};
    auto zero = [](double) { return 0.0; };
    auto mp = [](double u) { return 2.0 * (u - 0.4); };
    auto mpp = [](double) { return 2.0; };
    const AsymptoticQuantities aq =
        asymptotic_quantities(zero, zero, mp, mp, mpp, mpp, w, 0.2, kSpec, 512);
    CHECK(aq.bias0 == 0.0);
    CHECK(aq.variance == 0.0);
}

TEST_CASE("inner integral for a quadratic curve is window length over 8") {
    // m(x) = x^2: second derivative 2, first derivative 2u; with unit
    // variance and one active sample the bias factors into
    // moment^2 / sqrt(b) * conv0 * (u-window length) / 8
    const Window w{-1.8 + 0.01, 0.6};
    auto one = [](double) { return 1.0; };
    auto zero = [](double) { return 0.0; };
    auto mp = [](double u) { return 2.0 * u; };
    auto mpp = [](double) { return 2.0; };
    const double b = 0.25;
    const std::size_t quad = 8192;
    const AsymptoticQuantities aq =
        asymptotic_quantities(one, zero, mp, mp, mpp, mpp, w, b, kSpec, quad);
    const double moment = kSpec.density_deriv_moment;
    const double conv0 = kprime_convolution(kSpec, 0.0, quad);
    // u in [0,1] with 2u inside the window: u in [0, 0.3]
    const double expected = moment * moment / std::sqrt(b) * conv0 * (0.3 / 8.0);
    CHECK(aq.bias0 == doctest::Approx(expected).epsilon(5e-3));
}

TEST_CASE("quadrature refinement is stable") {
    const Window w{-0.3, 0.9};
    auto one = [](double) { return 1.0; };
    auto mp1 = [](double u) { return 2.0 * (u - 0.3); };
    auto mp2 = [](double u) { return 2.0 * (u - 0.4); };
    auto mpp = [](double) { return 2.0; };
    const AsymptoticQuantities coarse =
        asymptotic_quantities(one, one, mp1, mp2, mpp, mpp, w, 0.2, kSpec, 4096);
    const AsymptoticQuantities fine =
        asymptotic_quantities(one, one, mp1, mp2, mpp, mpp, w, 0.2, kSpec, 8192);
    CHECK(std::abs(fine.bias0 - coarse.bias0) / fine.bias0 < 1e-3);
    CHECK(std::abs(fine.variance - coarse.variance) / fine.variance < 1e-3);
}

TEST_CASE("asymptotic quantities match a high-resolution oracle") {
    // independent direct evaluation of both integrals on a fine grid
    const Window w{-0.3, 0.9};
    auto sig = [](double u) { return 1.0 / std::pow(1.0 - 0.6 * (u - 0.3) * (u - 0.3), 2.0); };
    auto mp1 = [](double u) { return 2.0 * (u - 0.3); };
    auto mp2 = [](double u) { return 2.0 * (u - 0.4); };
    const double b = 0.2;
    const std::size_t big = 200001;
    auto inner = [&](const std::function<double(double)>& mp, int p) {
        double sum = 0.0;
        const double du = 1.0 / static_cast<double>(big - 1);
        for (std::size_t k = 0; k < big; ++k) {
            const double u = k * du;
            const double slope = mp(u);
            if (slope < w.lo || slope > w.hi) continue;
            const double term = sig(u) / 8.0;
            sum += ((k == 0 || k + 1 == big) ? 0.5 : 1.0) * (p == 1 ? term : term * term);
        }
        return sum * du;
    };
    const KernelSpec fine = make_kernel_spec(KernelChoice::Epanechnikov, 100001);
    const double conv0 = 22.5;
    double conv2 = 0.0;
    {
        const std::size_t nz = 4001;
        const double dz = 4.0 / (nz - 1);
        for (std::size_t k = 0; k < nz; ++k) {
            const double z = -2.0 + k * dz;
            const double c = kprime_convolution(fine, z, 2048);
            conv2 += ((k == 0 || k + 1 == nz) ? 0.5 : 1.0) * c * c;
        }
        conv2 *= dz;
    }
    const double oracle_bias =
        1.0 / std::sqrt(b) * conv0 * (inner(mp1, 1) + inner(mp2, 1));
    const double oracle_var = 2.0 * conv2 * (inner(mp1, 2) + inner(mp2, 2));

    auto mpp = [](double) { return 2.0; };
    const AsymptoticQuantities aq =
        asymptotic_quantities(sig, sig, mp1, mp2, mpp, mpp, w, b, fine, 8192);
    CHECK(std::abs(aq.bias0 - oracle_bias) / oracle_bias <= 1e-3);
    CHECK(std::abs(aq.variance - oracle_var) / oracle_var <= 1e-3);
}

TEST_CASE("local alternative term adds the squared perturbation") {
    const Window w{0.0, 1.0};
    auto one = [](double) { return 1.0; };
    auto mp = [](double u) { return 2.0 * u; };
    auto mpp = [](double) { return 2.0; };
    RealFunction g = [](double) { return 2.0; };
    const AsymptoticQuantities with_g =
        asymptotic_quantities(one, one, mp, mp, mpp, mpp, w, 0.2, kSpec, 1024, g);
    const AsymptoticQuantities without =
        asymptotic_quantities(one, one, mp, mp, mpp, mpp, w, 0.2, kSpec, 1024);
    CHECK(with_g.bias_total - with_g.bias0 == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(with_g.bias0 == doctest::Approx(without.bias0));
}

TEST_CASE("non-convex curve inside the window raises") {
    const Window w{-0.5, 3.5};
    auto one = [](double) { return 1.0; };
    auto mp = [](double u) { return testutil::kPi * std::sin(testutil::kPi * u); };
    auto mpp = [](double u) {
        return testutil::kPi * testutil::kPi * std::cos(testutil::kPi * u);
    };
    try {
        (void)asymptotic_quantities(one, one, mp, mp, mpp, mpp, w, 0.2, kSpec, 512);
        FAIL("expected NonConvex");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonConvex);
    }
}

TEST_CASE("normal quantile") {
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(normal_quantile(0.975) == doctest::Approx(1.9599639845).epsilon(1e-8));
    CHECK(normal_quantile(0.95) == doctest::Approx(1.6448536270).epsilon(1e-8));
    CHECK(normal_quantile(0.025) == doctest::Approx(-1.9599639845).epsilon(1e-8));
    CHECK_THROWS_AS((void)normal_quantile(0.0), Error);
}

TEST_CASE("asymptotic decision rule") {
    TestStatistic t;
    t.value = 1e-9;
    AsymptoticQuantities aq; // zeros
    const AsymptoticDecision dec = asymptotic_test(t, aq, 100, 0.2, 0.05);
    CHECK(dec.threshold == 0.0);
    CHECK(dec.reject);

    aq.bias0 = 2.0;
    aq.variance = 4.0;
    const AsymptoticDecision med = asymptotic_test(t, aq, 100, 0.2, 0.5);
    CHECK(med.threshold ==
          doctest::Approx(2.0 / (100.0 * std::pow(0.2, 4.5))).epsilon(1e-12));
    CHECK_THROWS_AS((void)asymptotic_test(t, aq, 100, 0.2, 1.5), Error);
}

TEST_CASE("asymptotic test on simulated null data rejects rarely") {
    // plug-in thresholds with the true variance curve and curvature; the
    // rate is only loosely pinned because convergence is slow
    const CurvePair cp = curve_pair(RegressionPair::ExA);
    const std::size_t n = 500;
    const double scale = kBenchmarkNoiseScale;
    auto sig = [scale](double u) {
        const double a = 0.6 * (u - 0.3) * (u - 0.3);
        return scale * scale / ((1.0 - a) * (1.0 - a));
    };
    auto mpp = [](double) { return 2.0; };
    std::size_t rejects = 0, total = 0;
    for (std::size_t rep = 0; rep < 200; ++rep) {
        Rng r1 = Rng::derive(606, rep, 1);
        Rng r2 = Rng::derive(606, rep, 2);
        const Sample s1 = testutil::noisy_sample(cp.m1, n, ErrorModel::benchmark(1), r1);
        const Sample s2 = testutil::noisy_sample(cp.m2, n, ErrorModel::benchmark(2), r2);
        try {
            const double b1 = gcv_bandwidth(s1, kSpec, default_gcv_grid(n));
            const double b2 = gcv_bandwidth(s2, kSpec, default_gcv_grid(n));
            const CurveEstimate c1 = fit_local_linear(s1, b1, kSpec);
            const CurveEstimate c2 = fit_local_linear(s2, b2, kSpec);
            const double h = std::pow(static_cast<double>(n), -1.0 / 3.0);
            DensityEstimate d1 = rearrangement_density(c1, n, h, kSpec);
            DensityEstimate d2 = rearrangement_density(c2, n, h, kSpec);
            ShiftEstimate shift = estimate_shift(c1, c2, d1, d2, 0.01);
            if (shift.swapped) std::swap(d1, d2);
            const TestStatistic t = test_statistic(d1, d2, shift, 500);
            auto mp1 = shift.swapped ? cp.m2_prime : cp.m1_prime;
            auto mp2 = shift.swapped ? cp.m1_prime : cp.m2_prime;
            const AsymptoticQuantities aq = asymptotic_quantities(
                sig, sig, mp1, mp2, mpp, mpp, t.window, b1, kSpec, 512);
            if (asymptotic_test(t, aq, n, b1, 0.05).reject) ++rejects;
            ++total;
        } catch (const Error&) {}
    }
    REQUIRE(total >= 150);
    const double rate = static_cast<double>(rejects) / static_cast<double>(total);
    CHECK(rate >= 0.0);
    CHECK(rate <= 0.25);
}
