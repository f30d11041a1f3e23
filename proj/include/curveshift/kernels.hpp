#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace curveshift {

enum class KernelChoice { Epanechnikov, Biweight };

KernelChoice kernel_choice_from_string(const std::string& name);
const char* kernel_choice_name(KernelChoice choice);

/// Closed-form kernels and the constants derived from them. All kernels
/// are supported on [-1, 1] and vanish outside.
///   base          smoothing kernel for the local linear fit
///   density       kernel for the rearrangement density
///   lrv           kernel for long-run-variance weights
struct KernelSpec {
    std::function<double(double)> base;
    std::function<double(double)> base_deriv;
    std::function<double(double)> density;
    std::function<double(double)> density_deriv;
    std::function<double(double)> lrv;

    double second_moment = 0.0;        // integral of x^2 base(x)
    double density_deriv_moment = 0.0; // integral of v density'(v)
    std::size_t quad_points = 512;
};

/// Build a KernelSpec; moments are computed with composite trapezoid
/// quadrature on `quad_points` nodes (deterministic, testable).
KernelSpec make_kernel_spec(KernelChoice choice = KernelChoice::Epanechnikov,
                            std::size_t quad_points = 512);

/// Composite trapezoid rule on `points` nodes (points >= 2).
double trapezoid(const std::function<double(double)>& f,
                 double a, double b, std::size_t points);

/// The effective kernel of the local-linear slope: base(x) * x / mu2.
/// Odd; zero outside [-1, 1].
double equivalent_kernel(const KernelSpec& spec, double x);

/// Derivative of the equivalent kernel; even; zero outside (-1, 1).
double equivalent_kernel_derivative(const KernelSpec& spec, double x);

/// Self-convolution of the equivalent kernel's derivative evaluated at z,
/// by trapezoid quadrature. Even in z; zero for |z| >= 2.
double kprime_convolution(const KernelSpec& spec, double z,
                          std::size_t quad_points = 512);

/// integral over z of kprime_convolution(z)^2 (appears in the variance
/// constant of the test statistic's limit distribution).
double kprime_convolution_squared_integral(const KernelSpec& spec,
                                           std::size_t quad_points = 512);

} // namespace curveshift
