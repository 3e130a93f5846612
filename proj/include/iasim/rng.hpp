#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "iasim/complex_matrix.hpp"

namespace iasim {

/// SplitMix64 output function. Used only to derive substream seeds; the
/// draw engine is std::mt19937_64 (its output sequence is pinned by the
/// C++ standard, so results are identical across platforms and compilers).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic substream seed from a base seed and a path of stream ids
/// (trial index, link indices, restart index, ...). Each id is absorbed into
/// the SplitMix64 state, so substream(s, {a,b}) != substream(s, {b,a}).
inline std::uint64_t substream_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> ids) {
    std::uint64_t state = base;
    std::uint64_t out = splitmix64(state);
    for (std::uint64_t id : ids) {
        state ^= id + 0x9E3779B97F4A7C15ULL + (state << 6) + (state >> 2);
        out = splitmix64(state);
    }
    return out;
}

/// Seedable generator: mt19937_64 core, uniform doubles via the 53-bit
/// mantissa mapping, normals via the Marsaglia polar method (the standard
/// library distributions are not bit-stable across implementations, so both
/// mappings are spelled out here).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

    /// Standard normal N(0, 1).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    /// Circularly symmetric complex Gaussian CN(0, 1):
    /// real and imaginary parts independent N(0, 1/2).
    cplx cgaussian() {
        const double a = gaussian();
        const double b = gaussian();
        return cplx{a, b} * 0.7071067811865476;
    }

    /// Matrix of i.i.d. CN(0, 1) entries, row-major draw order.
    CMatrix cgaussian_matrix(std::size_t rows, std::size_t cols) {
        CMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = cgaussian();
        return m;
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace iasim
