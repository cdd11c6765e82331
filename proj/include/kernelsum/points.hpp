#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace kernelsum {

/// n points in R^d, row-major.
struct PointSet {
    std::size_t n = 0;
    int d = 0;
    std::vector<double> coords;

    PointSet() = default;
    PointSet(std::size_t n_, int d_) : n(n_), d(d_), coords(n_ * static_cast<std::size_t>(d_), 0.0) {}
    PointSet(std::size_t n_, int d_, std::vector<double> c) : n(n_), d(d_), coords(std::move(c)) {
        if (coords.size() != n * static_cast<std::size_t>(d)) throw ContractError("PointSet: coordinate count must be n*d");
    }

    std::span<double> row(std::size_t i) { return {coords.data() + i * d, static_cast<std::size_t>(d)}; }
    std::span<const double> row(std::size_t i) const { return {coords.data() + i * d, static_cast<std::size_t>(d)}; }
};

/// out[i·nb + b] = ⟨p_i, v_b⟩ − shift[b] for a block of nb vectors stored
/// transposed (vt[k·nb + b] = v_b[k]). Each entry is accumulated over k in
/// index order, so its value does not depend on nb or on the worker count.
inline void project_block(const PointSet& ps, const double* vt, std::size_t nb, const double* shift, double* out) {
    const int d = ps.d;
    parallel_for(ps.n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            double* __restrict o = out + i * nb;
            const double* __restrict r = ps.coords.data() + i * d;
            for (std::size_t b = 0; b < nb; ++b) o[b] = 0.0;
            for (int k = 0; k < d; ++k) {
                const double v = r[k];
                const double* __restrict col = vt + static_cast<std::size_t>(k) * nb;
                for (std::size_t b = 0; b < nb; ++b) o[b] += v * col[b];
            }
            if (shift)
                for (std::size_t b = 0; b < nb; ++b) o[b] -= shift[b];
        }
    });
}

/// Same values as project_block, stored slice-major: out[b·n + i]. Points are
/// projected in small tiles and written transposed, so each slice ends up
/// contiguous.
inline void project_block_by_slice(const PointSet& ps, const double* vt, std::size_t nb, const double* shift,
                                   double* out) {
    constexpr std::size_t kPoints = 32;
    const int d = ps.d;
    const std::size_t n = ps.n;
    const std::size_t tiles = (n + kPoints - 1) / kPoints;
    parallel_for(tiles, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> tile(kPoints * nb);
        for (std::size_t t = lo; t < hi; ++t) {
            const std::size_t i0 = t * kPoints;
            const std::size_t np = std::min(kPoints, n - i0);
            for (std::size_t i = 0; i < np; ++i) {
                double* __restrict o = tile.data() + i * nb;
                const double* __restrict r = ps.coords.data() + (i0 + i) * d;
                for (std::size_t b = 0; b < nb; ++b) o[b] = 0.0;
                for (int k = 0; k < d; ++k) {
                    const double v = r[k];
                    const double* __restrict col = vt + static_cast<std::size_t>(k) * nb;
                    for (std::size_t b = 0; b < nb; ++b) o[b] += v * col[b];
                }
                if (shift)
                    for (std::size_t b = 0; b < nb; ++b) o[b] -= shift[b];
            }
            for (std::size_t b = 0; b < nb; ++b)
                for (std::size_t i = 0; i < np; ++i) out[b * n + i0 + i] = tile[i * nb + b];
        }
    });
}

}  // namespace kernelsum
