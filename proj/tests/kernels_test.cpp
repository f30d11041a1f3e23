#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "curveshift/error.hpp"
#include "curveshift/kernels.hpp"

#include <cmath>

using namespace curveshift;

namespace {
// high-resolution Simpson oracle, independent of the library quadrature
double simpson_oracle(const std::function<double(double)>& f, double a, double b,
                      int n = 20000) {
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return sum * h / 3.0;
}
} // namespace

TEST_CASE("kernel densities integrate to one") {
    for (auto choice : {KernelChoice::Epanechnikov, KernelChoice::Biweight}) {
        const KernelSpec spec = make_kernel_spec(choice);
        const double base_mass = trapezoid(spec.base, -1.0, 1.0, 20001);
        const double dens_mass = trapezoid(spec.density, -1.0, 1.0, 20001);
        const double lrv_mass = trapezoid(spec.lrv, -1.0, 1.0, 20001);
        CHECK(base_mass == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(dens_mass == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(lrv_mass == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("kernel symmetry and positive second moment") {
    for (auto choice : {KernelChoice::Epanechnikov, KernelChoice::Biweight}) {
        const KernelSpec spec = make_kernel_spec(choice);
        for (double x : {0.1, 0.35, 0.77, 0.999}) {
            CHECK(spec.base(x) == doctest::Approx(spec.base(-x)));
            CHECK(spec.density(x) == doctest::Approx(spec.density(-x)));
        }
        CHECK(spec.base(1.2) == 0.0);
        CHECK(spec.density(-1.01) == 0.0);
        CHECK(spec.second_moment > 0.0);
    }
}

TEST_CASE("second moment against quadrature oracle") {
    const KernelSpec epan = make_kernel_spec(KernelChoice::Epanechnikov);
    const double mu2_oracle = simpson_oracle(
        [&](double x) { return x * x * epan.base(x); }, -1.0, 1.0);
    CHECK(mu2_oracle == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(epan.second_moment == doctest::Approx(mu2_oracle).epsilon(1e-4));

    const KernelSpec biw = make_kernel_spec(KernelChoice::Biweight);
    CHECK(biw.second_moment == doctest::Approx(1.0 / 7.0).epsilon(1e-4));
}

TEST_CASE("equivalent kernel values") {
    const KernelSpec spec = make_kernel_spec(KernelChoice::Epanechnikov);
    CHECK(equivalent_kernel(spec, 0.0) == 0.0);
    // mu2 = 0.2 by quadrature, then K(0.5) * 0.5 / mu2
    CHECK(equivalent_kernel(spec, 0.5) == doctest::Approx(1.40625).epsilon(1e-4));
    CHECK(equivalent_kernel(spec, 1.5) == 0.0);
    CHECK(equivalent_kernel(spec, -1.0) == 0.0);
    // odd function
    for (double x : {0.2, 0.6, 0.9}) {
        CHECK(equivalent_kernel(spec, -x) ==
              doctest::Approx(-equivalent_kernel(spec, x)));
    }
}

TEST_CASE("equivalent kernel normalization") {
    for (auto choice : {KernelChoice::Epanechnikov, KernelChoice::Biweight}) {
        const KernelSpec spec = make_kernel_spec(choice);
        const double norm = trapezoid(
            [&](double x) { return equivalent_kernel(spec, x) * x; }, -1.0, 1.0,
            spec.quad_points);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("equivalent kernel derivative") {
    const KernelSpec spec = make_kernel_spec(KernelChoice::Epanechnikov);
    // symbolic oracle: 3.75 (1 - 3 x^2)
    CHECK(equivalent_kernel_derivative(spec, 0.0) == doctest::Approx(3.75).epsilon(1e-4));
    for (double x : {0.1, 0.4, 0.8}) {
        CHECK(equivalent_kernel_derivative(spec, x) ==
              doctest::Approx(3.75 * (1.0 - 3.0 * x * x)).epsilon(1e-4));
        CHECK(equivalent_kernel_derivative(spec, -x) ==
              doctest::Approx(equivalent_kernel_derivative(spec, x)));
    }
    CHECK(equivalent_kernel_derivative(spec, 2.0) == 0.0);
}

TEST_CASE("derivative kernel convolution") {
    const KernelSpec spec = make_kernel_spec(KernelChoice::Epanechnikov);
    CHECK(kprime_convolution(spec, 3.0) == 0.0);
    CHECK(kprime_convolution(spec, -2.0) == 0.0);
    // symbolic oracle at zero: 2 * 3.75^2 * (1 - 2 + 9/5) = 22.5; the
    // default spec carries the quadrature second moment, so check that at
    // 1e-3 and the high-precision spec at 1e-7
    CHECK(kprime_convolution(spec, 0.0) == doctest::Approx(22.5).epsilon(1e-3));
    const KernelSpec fine = make_kernel_spec(KernelChoice::Epanechnikov, 100001);
    CHECK(kprime_convolution(fine, 0.0, 512) == doctest::Approx(22.5).epsilon(1e-7));
    for (double z : {0.3, 0.9, 1.4}) {
        CHECK(kprime_convolution(spec, z) ==
              doctest::Approx(kprime_convolution(spec, -z)).epsilon(1e-10));
    }
}

TEST_CASE("convolution quadrature converges") {
    const KernelSpec spec = make_kernel_spec(KernelChoice::Epanechnikov);
    for (double z : {0.0, 0.5, 1.0}) {
        const double coarse = kprime_convolution(spec, z, 512);
        const double fine = kprime_convolution(spec, z, 1024);
        CHECK(std::abs(fine - coarse) < 1e-6);
    }
}

TEST_CASE("density derivative moment") {
    const KernelSpec spec = make_kernel_spec(KernelChoice::Epanechnikov);
    // closed form for this kernel: integral of v * (-1.5 v) over [-1,1] = -1
    CHECK(spec.density_deriv_moment == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("quadrature validation") {
    const KernelSpec spec = make_kernel_spec(KernelChoice::Epanechnikov);
    CHECK_THROWS_AS((void)kprime_convolution(spec, 0.0, 32), Error);
    CHECK_THROWS_AS((void)trapezoid([](double) { return 1.0; }, 0.0, 1.0, 1), Error);
}
