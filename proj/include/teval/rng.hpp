#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

// Deterministic draws on top of std::mt19937_64. The standard distribution
// adaptors are implementation-defined, so everything that must reproduce
// bit-for-bit across toolchains draws through these helpers instead.
namespace teval::rng {

/// Uniform double in [0, 1).
inline double unit(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform double in the open interval (0, 1).
inline double unit_open(std::mt19937_64& g) {
    return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

/// Uniform index in [0, n). n must be > 0.
inline std::size_t index(std::mt19937_64& g, std::size_t n) {
    return static_cast<std::size_t>(g() % n);
}

/// Uniform integer in [lo, hi] inclusive.
inline int int_in(std::mt19937_64& g, int lo, int hi) {
    return lo + static_cast<int>(index(g, static_cast<std::size_t>(hi - lo + 1)));
}

/// Fisher-Yates shuffle.
template <typename T>
void shuffle(std::mt19937_64& g, std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = index(g, i);
        using std::swap;
        swap(v[i - 1], v[j]);
    }
}

/// k distinct indices drawn without replacement from [0, n), k <= n.
inline std::vector<std::size_t> sample_indices(std::mt19937_64& g, std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + index(g, n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace teval::rng
