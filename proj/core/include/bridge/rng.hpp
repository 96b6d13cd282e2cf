#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bridge {

/// Seeded random stream owned by exactly one chain or replicate.
///
/// Wraps a 64-bit Mersenne twister. Two streams built from the same seed
/// produce identical sequences; streams are never shared across threads.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }
    double normal() { return normal_(engine_); }
    double exponential() { return -std::log(uniform()); }
    /// Gamma with the given shape and rate.
    double gamma(double shape, double rate = 1.0) {
        std::gamma_distribution<double> dist(shape, 1.0);
        return dist(engine_) / rate;
    }
    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

    std::mt19937_64& engine() { return engine_; }

    /// Seed for the i-th independent stream derived from a base seed.
    static std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index) {
        return base + index;
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace bridge
