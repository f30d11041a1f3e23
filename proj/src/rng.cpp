#include "curveshift/rng.hpp"

#include <cmath>

namespace curveshift {

std::uint64_t mix_seed(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng Rng::derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = mix_seed(seed);
    s = mix_seed(s ^ mix_seed(a + 0x632BE59BD9B4E019ULL));
    s = mix_seed(s ^ mix_seed(b + 0x9E6C63D0876A9A47ULL));
    return Rng(s);
}

double Rng::uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; 1 - U keeps the argument of log strictly positive.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double Rng::student_t5() {
    const double z = normal();
    double chi2 = 0.0;
    for (int k = 0; k < 5; ++k) {
        const double g = normal();
        chi2 += g * g;
    }
    return z / std::sqrt(chi2 / 5.0);
}

} // namespace curveshift
