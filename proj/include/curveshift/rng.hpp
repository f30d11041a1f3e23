#pragma once

#include <cstdint>
#include <random>

namespace curveshift {

/// Deterministic random stream. The engine is the standard-pinned
/// mt19937_64; uniform/normal/t mappings are implemented here so draws
/// are bit-identical across platforms and library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Derive an independent stream from (seed, a, b). Used to give every
    /// Monte Carlo run / bootstrap replicate / sample its own stream so
    /// results do not depend on scheduling.
    static Rng derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

    /// Uniform on [0, 1).
    double uniform();

    /// Standard normal (Box-Muller, one spare cached per stream).
    double normal();

    /// Student t with 5 degrees of freedom (variance 5/3).
    double student_t5();

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// splitmix64 mix step; exposed for seed derivation in tests.
std::uint64_t mix_seed(std::uint64_t x);

} // namespace curveshift
