#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace conceptscope {

// std::mt19937_64 produces the same stream on every conforming implementation, but the
// <random> distributions do not. Everything below maps raw engine output to values by hand
// so that sampled subgraphs, negatives and synthetic corpora are byte-stable across platforms.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Labeled seed derivation: hash(base, label, year, index).
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::int64_t year = 0,
                                 std::uint64_t index = 0) {
    std::uint64_t h = splitmix64(base);
    h = splitmix64(h ^ fnv1a64(label));
    h = splitmix64(h ^ static_cast<std::uint64_t>(year));
    h = splitmix64(h ^ index);
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound), unbiased.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Standard normal via Box-Muller (one value per call, deterministic).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::mt19937_64 engine_;
};

/// k distinct values from [0, population), sorted ascending (Floyd's algorithm).
inline std::vector<std::uint64_t> sample_without_replacement(std::uint64_t population, std::uint64_t k,
                                                             Rng& rng) {
    std::vector<std::uint64_t> chosen;
    if (k >= population) {
        chosen.resize(population);
        for (std::uint64_t i = 0; i < population; ++i) chosen[i] = i;
        return chosen;
    }
    chosen.reserve(k);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(k * 2);
    for (std::uint64_t j = population - k; j < population; ++j) {
        const std::uint64_t t = rng.below(j + 1);
        const std::uint64_t pick = seen.contains(t) ? j : t;
        seen.insert(pick);
        chosen.push_back(pick);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace conceptscope
