#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace kcf {

/// Seedable generator with bit-reproducible streams: mt19937_64 raw draws
/// mapped through explicit transforms, so results do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1]; never returns 0, so log() is safe.
    double uniform01() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * (uniform01() - 0x1.0p-53); }

    /// Standard normal via Box-Muller; consumes two uniforms per draw.
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    bool bernoulli(double p) { return uniform01() <= p; }

private:
    static constexpr double pi = 3.14159265358979323846;
    std::mt19937_64 engine_;
};

}  // namespace kcf
