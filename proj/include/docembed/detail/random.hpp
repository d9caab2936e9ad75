#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace docembed::detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Folds independent stream labels into one engine seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t state = 0x6A09E667F3BCC909ull;
    state ^= a;
    std::uint64_t h = splitmix64(state);
    state ^= b;
    h ^= splitmix64(state);
    state ^= c;
    h ^= splitmix64(state);
    return h;
}

// Uniform draw from [0, n) by rejection. std::uniform_int_distribution's
// mapping is implementation-defined; this one is pinned.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("bounded: n must be positive");
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (kMax % n + 1) % n;  // 2^64 mod n
    for (;;) {
        const std::uint64_t x = rng();
        if (rem == 0 || x <= kMax - rem) return x % n;
    }
}

// Partial Fisher-Yates: leaves a uniform without-replacement sample of
// size k in v[0..k).
template <typename T>
void shuffle_prefix(std::vector<T>& v, std::size_t k, std::mt19937_64& rng) {
    if (k > v.size()) throw std::invalid_argument("shuffle_prefix: k exceeds size");
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded(rng, v.size() - i));
        std::swap(v[i], v[j]);
    }
}

// Uniform in (0, 1]; the +1 keeps log() finite in Box-Muller.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

inline double gaussian(std::mt19937_64& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline std::vector<double> random_unit_vector(std::mt19937_64& rng, std::size_t dim) {
    std::vector<double> v(dim);
    for (;;) {
        double norm_sq = 0.0;
        for (auto& x : v) {
            x = gaussian(rng);
            norm_sq += x * x;
        }
        const double norm = std::sqrt(norm_sq);
        if (norm > 1e-9) {
            for (auto& x : v) x /= norm;
            return v;
        }
    }
}

}  // namespace docembed::detail
