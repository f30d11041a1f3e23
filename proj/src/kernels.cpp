#include "curveshift/kernels.hpp"

#include "curveshift/error.hpp"

#include <cmath>

namespace curveshift {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::AllCandidatesSingular: return "AllCandidatesSingular";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::ShiftOutOfRange: return "ShiftOutOfRange";
    case ErrorCode::NonConvex: return "NonConvex";
    case ErrorCode::BlockTooLarge: return "BlockTooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

KernelChoice kernel_choice_from_string(const std::string& name) {
    if (name == "epanechnikov") return KernelChoice::Epanechnikov;
    if (name == "biweight") return KernelChoice::Biweight;
    throw Error(ErrorCode::InvalidArgument, "unknown kernel '" + name + "'");
}

const char* kernel_choice_name(KernelChoice choice) {
    return choice == KernelChoice::Epanechnikov ? "epanechnikov" : "biweight";
}

double trapezoid(const std::function<double(double)>& f,
                 double a, double b, std::size_t points) {
    if (points < 2) throw Error(ErrorCode::InvalidArgument, "trapezoid needs >= 2 points");
    if (a == b) return 0.0;
    const double h = (b - a) / static_cast<double>(points - 1);
    double sum = 0.5 * (f(a) + f(b));
    for (std::size_t k = 1; k + 1 < points; ++k) {
        sum += f(a + static_cast<double>(k) * h);
    }
    return sum * h;
}

namespace {

double epanechnikov(double x) {
    if (std::abs(x) > 1.0) return 0.0;
    return 0.75 * (1.0 - x * x);
}

// One-sided limits at the support endpoints; zero outside.
double epanechnikov_deriv(double x) {
    if (std::abs(x) > 1.0) return 0.0;
    return -1.5 * x;
}

double biweight(double x) {
    if (std::abs(x) > 1.0) return 0.0;
    const double u = 1.0 - x * x;
    return (15.0 / 16.0) * u * u;
}

double biweight_deriv(double x) {
    if (std::abs(x) > 1.0) return 0.0;
    return -(15.0 / 4.0) * x * (1.0 - x * x);
}

} // namespace

KernelSpec make_kernel_spec(KernelChoice choice, std::size_t quad_points) {
    KernelSpec spec;
    spec.quad_points = quad_points;
    switch (choice) {
    case KernelChoice::Epanechnikov:
        spec.base = epanechnikov;
        spec.base_deriv = epanechnikov_deriv;
        spec.density = epanechnikov;
        spec.density_deriv = epanechnikov_deriv;
        spec.lrv = epanechnikov;
        break;
    case KernelChoice::Biweight:
        spec.base = biweight;
        spec.base_deriv = biweight_deriv;
        spec.density = biweight;
        spec.density_deriv = biweight_deriv;
        spec.lrv = biweight;
        break;
    }
    spec.second_moment = trapezoid(
        [&spec](double x) { return x * x * spec.base(x); }, -1.0, 1.0, quad_points);
    spec.density_deriv_moment = trapezoid(
        [&spec](double v) { return v * spec.density_deriv(v); }, -1.0, 1.0, quad_points);
    return spec;
}

double equivalent_kernel(const KernelSpec& spec, double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    return spec.base(x) * x / spec.second_moment;
}

double equivalent_kernel_derivative(const KernelSpec& spec, double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    return (spec.base_deriv(x) * x + spec.base(x)) / spec.second_moment;
}

double kprime_convolution(const KernelSpec& spec, double z, std::size_t quad_points) {
    if (quad_points < 64) {
        throw Error(ErrorCode::InvalidArgument, "kprime_convolution needs quad_points >= 64");
    }
    if (std::abs(z) >= 2.0) return 0.0;
    // The integrand is smooth only on the overlap of the two supports (the
    // factors' derivatives jump at the support edges), so integrate exactly
    // there with composite Simpson; the edge values use the inside limits.
    const double lo = std::max(-1.0, -1.0 - z);
    const double hi = std::min(1.0, 1.0 - z);
    if (!(lo < hi)) return 0.0;
    auto inside_deriv = [&spec](double x) {
        return (spec.base_deriv(x) * x + spec.base(x)) / spec.second_moment;
    };
    auto integrand = [&](double y) { return inside_deriv(y) * inside_deriv(z + y); };
    std::size_t n = quad_points;
    if (n % 2 != 0) ++n;
    const double h = (hi - lo) / static_cast<double>(n);
    double sum = integrand(lo) + integrand(hi);
    for (std::size_t i = 1; i < n; ++i) {
        sum += (i % 2 ? 4.0 : 2.0) * integrand(lo + static_cast<double>(i) * h);
    }
    return sum * h / 3.0;
}

double kprime_convolution_squared_integral(const KernelSpec& spec,
                                           std::size_t quad_points) {
    auto integrand = [&spec, quad_points](double z) {
        const double c = kprime_convolution(spec, z, quad_points);
        return c * c;
    };
    return trapezoid(integrand, -2.0, 2.0, quad_points);
}

} // namespace curveshift
