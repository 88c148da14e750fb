/* Deterministic random number generation.
 *
 * SplitMix64 with hand-rolled uniform and Box-Muller normal variates, so
 * that every stream is bit-reproducible across platforms and compilers
 * (std::normal_distribution is implementation-defined and is not).
 */
#pragma once

#include <cmath>
#include <cstdint>

#include "opsplit/vector.hpp"

namespace opsplit {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Standard normal via Box-Muller (one spare cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    Vector uniform_vector(std::size_t n, double lo, double hi) {
        Vector v(n);
        for (auto& x : v) x = uniform(lo, hi);
        return v;
    }

    Vector normal_vector(std::size_t n, double mean, double stddev) {
        Vector v(n);
        for (auto& x : v) x = normal(mean, stddev);
        return v;
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace opsplit
