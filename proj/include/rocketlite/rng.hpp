#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace rkl {

// All randomness in the library flows through this wrapper. mt19937_64 raw
// output is pinned by the standard, but the <random> distributions are not,
// so we do our own reductions. That keeps generated corpora, channel
// assignments and bias calibration bit-identical across compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(mix(seed)) {}

    // Derives an independent stream per purpose so that adding draws in one
    // place does not shift every other consumer of the same seed.
    Rng(std::uint64_t seed, std::string_view stream) : gen_(mix(seed ^ fnv1a(stream))) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, n). Modulo reduction; the bias is irrelevant at our n.
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

    // Uniform in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Uniform in [0, 1) with 53 significant bits.
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    // Marsaglia polar method, computed from unit() draws only.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * unit() - 1.0;
            v = 2.0 * unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

private:
    // splitmix64 finalizer; spreads low-entropy seeds before feeding the
    // engine.
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rkl
