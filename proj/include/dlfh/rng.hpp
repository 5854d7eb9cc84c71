#ifndef DLFH_RNG_HPP
#define DLFH_RNG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "dlfh/common.hpp"

namespace dlfh {

// Seeded generator with pinned derivation of every distribution we use.
// Standard-library distributions are implementation-defined, so uniform
// indices, signs and gaussians are derived here from raw mt19937_64 draws;
// equal seeds give equal sequences on every build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double sign() { return (next() & 1u) ? 1.0 : -1.0; }

    // Unbiased integer in [0, n) via rejection of the biased tail.
    Index uniform_index(Index n) {
        DLFH_REQUIRE(n >= 1, "uniform_index: n must be >= 1, got " << n);
        const auto un = static_cast<std::uint64_t>(n);
        for (;;) {
            std::uint64_t x = next();
            std::uint64_t r = x % un;
            if (x - r <= UINT64_MAX - un + 1) return static_cast<Index>(r);
        }
    }

    // Standard normal via Box-Muller; two raw draws per call.
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // m distinct indices from [0, n), returned sorted ascending.
    // Partial Fisher-Yates; the sorted order keeps gathered similarity
    // columns cache-friendly and makes the m = n case coincide with the
    // natural full-range order.
    std::vector<Index> sample_without_replacement(Index n, Index m) {
        DLFH_REQUIRE(m >= 0 && m <= n,
                     "sample_without_replacement: need 0 <= m <= n, got m="
                         << m << " n=" << n);
        std::vector<Index> idx(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
        for (Index i = 0; i < m; ++i) {
            const Index j = i + uniform_index(n - i);
            std::swap(idx[static_cast<std::size_t>(i)],
                      idx[static_cast<std::size_t>(j)]);
        }
        idx.resize(static_cast<std::size_t>(m));
        std::sort(idx.begin(), idx.end());
        return idx;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace dlfh

#endif  // DLFH_RNG_HPP
