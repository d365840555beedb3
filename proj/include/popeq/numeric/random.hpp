#pragma once

// Seeded samplers with bit-reproducible output.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The std:: distribution classes are not (their algorithms vary
// between library implementations), so every transformation from raw 64-bit
// words to variates is written out here.
//
// Stream splitting: worker stream k of master seed s is seeded with
// splitmix64(s + (k + 1) * 0x9E3779B97F4A7C15). Harness replication r uses
// stream r, so output is independent of how replications are scheduled.

#include <cmath>
#include <cstdint>
#include <random>

#include "popeq/error.hpp"

namespace popeq {

struct RngSeed {
    std::uint64_t seed = 0;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline constexpr RngSeed derive_stream(RngSeed master, std::uint64_t stream) {
    return {splitmix64(master.seed + (stream + 1) * 0x9E3779B97F4A7C15ULL)};
}

class Sampler {
public:
    explicit Sampler(RngSeed seed) : engine_(seed.seed) {}

    std::uint64_t next_word() { return engine_(); }

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        if (!(lo < hi)) throw DomainError("uniform: require lo < hi");
        return lo + (hi - lo) * uniform();
    }

    /// Standard normal via the Marsaglia polar method.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u;
        double v;
        double s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

    double normal(double mean, double sd) {
        if (!(sd > 0.0)) throw DomainError("normal: sd must be positive");
        return mean + sd * normal();
    }

    /// Normal(mean, sd) conditioned on exceeding `lower`, by rejection.
    double truncated_normal(double mean, double sd, double lower, int max_tries = 1000000) {
        if (!(sd > 0.0)) throw DomainError("truncated_normal: sd must be positive");
        for (int i = 0; i < max_tries; ++i) {
            const double x = normal(mean, sd);
            if (x > lower) return x;
        }
        throw DomainError("truncated_normal: acceptance region has negligible mass");
    }

    /// Gamma with the shape-scale parameterization (mean = shape * scale),
    /// Marsaglia-Tsang squeeze method.
    double gamma(double shape, double scale = 1.0) {
        if (!(shape > 0.0) || !(scale > 0.0)) {
            throw DomainError("gamma: shape and scale must be positive");
        }
        if (shape < 1.0) {
            const double boost = std::pow(uniform(), 1.0 / shape);
            return gamma(shape + 1.0, scale) * boost;
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x;
            double v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

    double beta(double a, double b) {
        if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta: a and b must be positive");
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

    double chi_square(double df) { return gamma(0.5 * df, 2.0); }

    /// Uniform integer on {0, ..., n}.
    std::int64_t uniform_int(std::int64_t n) {
        if (n < 0) throw DomainError("uniform_int: n must be nonnegative");
        const auto range = static_cast<std::uint64_t>(n) + 1;
        // Rejection removes modulo bias.
        const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % range;
        std::uint64_t word;
        do {
            word = engine_();
        } while (word >= limit);
        return static_cast<std::int64_t>(word % range);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace popeq
