#pragma once

// Seeded randomness helpers. All randomness in the project flows from a
// single base seed through named or indexed sub-seeds, and every sampling
// primitive here is fully specified (no implementation-defined distributions),
// so results are reproducible across platforms and standard libraries.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace narrdyn::rng {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Named sub-seed: sub = splitmix64(base ^ fnv1a64(name)).
inline uint64_t derive_seed(uint64_t base, std::string_view name) {
    return splitmix64(base ^ fnv1a64(name));
}

// Indexed sub-seed (per narrative, per restart, ...):
// sub = splitmix64(base + (index+1) * golden ratio increment).
inline uint64_t derive_seed(uint64_t base, uint64_t index) {
    return splitmix64(base + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

using Engine = std::mt19937_64;  // output sequence is fixed by the standard

inline Engine make_engine(uint64_t seed) { return Engine(seed); }

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Engine& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection; bound must be > 0.
inline uint64_t uniform_below(Engine& gen, uint64_t bound) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t v;
    do {
        v = gen();
    } while (v >= limit);
    return v % bound;
}

// Standard normal via Box-Muller. Consumes two uniforms per call and keeps
// no state, so call sites stay reproducible regardless of call interleaving.
inline double normal(Engine& gen) {
    double u1 = uniform01(gen);
    while (u1 <= 0.0) u1 = uniform01(gen);
    const double u2 = uniform01(gen);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
}

// Fisher-Yates shuffle using uniform_below.
template <typename T>
void shuffle(std::vector<T>& values, Engine& gen) {
    for (size_t i = values.size(); i > 1; --i) {
        const size_t j = static_cast<size_t>(uniform_below(gen, i));
        std::swap(values[i - 1], values[j]);
    }
}

inline std::vector<int> random_permutation(int n, Engine& gen) {
    std::vector<int> p(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = i;
    shuffle(p, gen);
    return p;
}

}  // namespace narrdyn::rng
