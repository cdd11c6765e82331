#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace kernelsum {

/// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
/// A stateless keyed bijection on 128-bit counters, so draw i of stream s is
/// a pure function of (key, s, i) and independent of evaluation order.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t seed) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    Block operator()(Block ctr) const noexcept {
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    std::array<std::uint32_t, 2> key_;
};

/// One reproducible stream of uniforms and normals. Block i of the stream is
/// Philox(key = seed, counter = (i_lo, i_hi, stream_lo, stream_hi)).
/// Each block yields two 53-bit uniforms, or two normals by Box-Muller.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : gen_(seed), stream_(stream) {}

    /// Uniform on [0, 1), draw index i.
    double uniform(std::uint64_t i) const noexcept {
        const auto b = block(i / 2);
        return i % 2 == 0 ? to_unit(b[0], b[1]) : to_unit(b[2], b[3]);
    }

    /// Standard normal, draw index i.
    double normal(std::uint64_t i) const noexcept {
        const auto z = box_muller(i / 2);
        return i % 2 == 0 ? z[0] : z[1];
    }

    /// Fills out[0..n) with normals n0, n0+1, ... reusing each Box-Muller pair.
    void normals(std::uint64_t first, std::size_t n, double* out) const noexcept {
        std::size_t j = 0;
        std::uint64_t i = first;
        if (i % 2 == 1 && j < n) out[j++] = normal(i++);
        for (; j + 1 < n; j += 2, i += 2) {
            const auto z = box_muller(i / 2);
            out[j] = z[0];
            out[j + 1] = z[1];
        }
        if (j < n) out[j] = normal(i);
    }

private:
    // Kept out of line so that every caller evaluates cos and sin the same
    // way; a fused sincos and a lone sin can differ in the last bit.
    [[gnu::noinline]] std::array<double, 2> box_muller(std::uint64_t pair) const noexcept {
        const auto b = block(pair);
        const double u1 = 1.0 - to_unit(b[0], b[1]);  // (0, 1]
        const double u2 = to_unit(b[2], b[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

    Philox4x32::Block block(std::uint64_t i) const noexcept {
        return gen_({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32),
                     static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)});
    }

    static double to_unit(std::uint32_t a, std::uint32_t b) noexcept {
        const std::uint64_t bits = (std::uint64_t{a >> 5} << 26) | (b >> 6);
        return static_cast<double>(bits) * 0x1.0p-53;
    }

    Philox4x32 gen_;
    std::uint64_t stream_;
};

/// Distinct stream families, so that e.g. directions and RFF frequencies
/// drawn from the same user seed never overlap.
enum class StreamTag : std::uint64_t {
    points_x = 1,
    points_y = 2,
    weights = 3,
    directions = 4,
    rff_frequencies = 5,
    rff_phases = 6,
    rff_radial = 7,
};

inline std::uint64_t stream_id(StreamTag tag, std::uint64_t index) noexcept {
    return (static_cast<std::uint64_t>(tag) << 56) ^ index;
}

}  // namespace kernelsum
