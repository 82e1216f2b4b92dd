#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace risklab {

// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for the `stream`-th child of `seed`. Children of distinct (seed, stream)
// pairs are effectively independent.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x51ed2701a9e5a3d5ULL));
}

// mt19937_64 with hand-rolled draws. The engine is fully specified by the
// standard; std:: distribution objects are not, and would break byte-identical
// reruns across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    Rng fork(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // Uniform integer in [lo, hi], inclusive, unbiased by rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(next_u64());  // full range
        const std::uint64_t threshold = (0 - span) % span;            // 2^64 mod span
        std::uint64_t r;
        do {
            r = next_u64();
        } while (r < threshold);
        return lo + static_cast<std::int64_t>(r % span);
    }

    bool coin() { return (next_u64() >> 63) != 0; }

    // Marsaglia polar method; the spare deviate is discarded.
    double normal() {
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        return u * std::sqrt(-2.0 * std::log(s) / s);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Fisher-Yates, so shuffles are reproducible across platforms.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace risklab
