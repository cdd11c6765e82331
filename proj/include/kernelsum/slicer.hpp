#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fastsum1d.hpp"
#include "fourier_coeffs.hpp"
#include "kernels.hpp"
#include "numeric.hpp"
#include "points.hpp"
#include "random.hpp"

namespace kernelsum {

struct DirectionSet {
    std::size_t P = 0;
    int d = 0;
    std::uint64_t seed = 0;
    std::vector<double> directions;  // P×d, row-major

    std::span<const double> operator[](std::size_t p) const {
        return {directions.data() + p * d, static_cast<std::size_t>(d)};
    }
};

namespace detail {

inline void draw_direction(std::uint64_t seed, std::size_t p, int d, double* out) {
    RandomStream rs(seed, stream_id(StreamTag::directions, p));
    std::uint64_t first = 0;
    for (;;) {
        rs.normals(first, static_cast<std::size_t>(d), out);
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += out[k] * out[k];
        if (s > 0.0 && d == 1) {
            out[0] = std::copysign(1.0, out[0]);
            return;
        }
        if (s > 0.0) {
            const double inv = 1.0 / std::sqrt(s);
            for (int k = 0; k < d; ++k) out[k] *= inv;
            return;
        }
        first += static_cast<std::uint64_t>(d);
    }
}

}  // namespace detail

/// P directions uniform on S^{d−1}: normalized standard normal vectors.
/// Direction p depends only on (seed, p).
inline DirectionSet sample_directions(std::size_t P, int d, std::uint64_t seed) {
    if (P < 1 || d < 1) throw DomainError("sample_directions: P and d must be >= 1");
    DirectionSet set{P, d, seed, std::vector<double>(P * static_cast<std::size_t>(d))};
    for (std::size_t p = 0; p < P; ++p) detail::draw_direction(seed, p, d, set.directions.data() + p * d);
    return set;
}

inline std::vector<double> project(const PointSet& points, std::span<const double> xi) {
    if (xi.size() != static_cast<std::size_t>(points.d)) throw ContractError("project: dimension mismatch");
    std::vector<double> out(points.n);
    for (std::size_t i = 0; i < points.n; ++i) {
        const auto r = points.row(i);
        double s = 0.0;
        for (int k = 0; k < points.d; ++k) s += r[k] * xi[k];
        out[i] = s;
    }
    return out;
}

struct SliceBatchConfig {
    /// Directions processed per batch; 0 selects min(P, 64).
    std::size_t batch_size = 0;

    std::size_t resolve(std::size_t P) const {
        const std::size_t B = batch_size == 0 ? std::min<std::size_t>(P, 64) : batch_size;
        if (B < 1 || B > P) throw DomainError("SliceBatchConfig: batch size must lie in [1, P]");
        return B;
    }
};

struct SliceOptions {
    Engine engine = Engine::automatic;
    double T = 0.2;
    /// Relative coefficient threshold for the Gaussian.
    double eps = 1e-10;
    /// Gaussian frequency cutoff; 0 selects it from eps.
    int kmax = 0;
    /// Band limit for numeric coefficients; 0 selects 2048 (Laplacian) or 512 (Matérn).
    int fourier_K = 0;
    /// Sampling grid for numeric coefficients; 0 selects 16·fourier_K.
    int grid_size = 0;
    SliceBatchConfig batch;
};

struct SumResult {
    std::vector<double> values;
    std::string method;
    std::size_t P = 0;
    std::size_t num_coeffs = 0;
    double tau = 1.0;
    double t_setup_s = 0.0;
    double t_project_s = 0.0;
    double t_fastsum_s = 0.0;
    double t_total_s = 0.0;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

enum class SlicePath { fourier, negdist, laplace };

/// The 1D problem solved on every slice, fixed once per call.
struct SliceSolver {
    SlicePath path = SlicePath::negdist;
    FourierCoeffSet coeffs;
    Engine engine = Engine::automatic;
    double tau = 1.0;
    double alpha = 0.0;
    int d = 1;

    std::vector<double> solve(std::vector<double>& px, std::vector<double>& py, std::span<const double> w) const {
        if (path == SlicePath::negdist) return negdist_fastsum(px, py, w, d);
        std::vector<double> neg;
        if (path == SlicePath::laplace) neg = negdist_fastsum(px, py, w, d);
        for (double& v : px) v *= tau;
        for (double& v : py) v *= tau;
        nufft::Grid1D gx(std::move(px)), gy(std::move(py));
        auto t = fourier_fastsum_unchecked(gx, gy, w, coeffs, engine);
        if (path == SlicePath::laplace)
            for (std::size_t m = 0; m < t.size(); ++m) t[m] += alpha * neg[m];
        return t;
    }
};

inline SliceSolver make_solver(const KernelSpec& spec, double radius, std::size_t nodes, const SliceOptions& opts) {
    SliceSolver s;
    s.d = spec.d;
    s.engine = opts.engine;
    if (spec.is<NegativeDistance>()) {
        s.path = SlicePath::negdist;
        return s;
    }
    if (spec.is<Gaussian>()) {
        s.path = SlicePath::fourier;
        s.tau = make_rescaling(-radius, radius, opts.T, rescale_tau_cap(spec)).tau;
        s.coeffs = select_coeff_set(spec, s.tau, opts.eps, opts.kmax);
    } else if (spec.is<Matern>() || spec.is<Laplacian>()) {
        s.path = spec.is<Matern>() ? SlicePath::fourier : SlicePath::laplace;
        if (spec.is<Laplacian>()) s.alpha = spec.as<Laplacian>().alpha;
        s.tau = make_rescaling(-radius, radius, opts.T).tau;
        const int K = opts.fourier_K > 0 ? opts.fourier_K : (spec.is<Laplacian>() ? 2048 : 512);
        const int G = opts.grid_size > 0 ? opts.grid_size : 16 * K;
        s.coeffs = numeric_fourier_coeffs(spec, s.tau, K, G);
    } else {
        throw UnsupportedKernelError("sliced_kernel_sum: no fast 1D summation for kernel " + spec.name());
    }
    if (s.engine == Engine::automatic) s.engine = choose_engine(s.coeffs, nodes);
    return s;
}

}  // namespace detail

/// Sliced fast summation s_m ≈ Σ_n w_n K(x_n, y_m): average over P random
/// directions of 1D fast sums of the projected data.
///
/// The result is bit-identical for a fixed seed regardless of batch size and
/// worker count: each slice is computed independently and slices are
/// reduced in index order.
inline SumResult sliced_kernel_sum(const KernelSpec& spec, const PointSet& x, const PointSet& y,
                                   std::span<const double> w, std::size_t P, std::uint64_t seed,
                                   const SliceOptions& opts = {}) {
    using detail::Clock;
    const auto t_start = Clock::now();
    spec.validate();
    if (x.d != spec.d || y.d != spec.d) throw ContractError("sliced_kernel_sum: point dimension does not match kernel");
    if (w.size() != x.n) throw ContractError("sliced_kernel_sum: weights and sources differ in length");
    if (P < 1) throw DomainError("sliced_kernel_sum: P must be >= 1");
    if (!(spec.is<Gaussian>() || spec.is<Laplacian>() || spec.is<Matern>() || spec.is<NegativeDistance>()))
        throw UnsupportedKernelError("sliced_kernel_sum: no fast 1D summation for kernel " + spec.name());
    const std::size_t B = opts.batch.resolve(P);
    const int d = spec.d;
    const std::size_t N = x.n, M = y.n;

    // Center the cloud so that all projections lie in [−R, R].
    std::vector<double> mean(d, 0.0);
    {
        std::vector<CompensatedSum> acc(d);
        for (std::size_t i = 0; i < N; ++i)
            for (int k = 0; k < d; ++k) acc[k].add(x.coords[i * d + k]);
        for (std::size_t i = 0; i < M; ++i)
            for (int k = 0; k < d; ++k) acc[k].add(y.coords[i * d + k]);
        const double inv = (N + M) > 0 ? 1.0 / static_cast<double>(N + M) : 0.0;
        for (int k = 0; k < d; ++k) mean[k] = acc[k].value() * inv;
    }
    double radius = 0.0;
    auto update_radius = [&](const PointSet& ps) {
        for (std::size_t i = 0; i < ps.n; ++i) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) {
                const double v = ps.coords[i * d + k] - mean[k];
                s += v * v;
            }
            radius = std::max(radius, std::sqrt(s));
        }
    };
    update_radius(x);
    update_radius(y);
    // Rounding in the projection can exceed the exact bound by a few ulps.
    radius *= 1.0 + 1e-12;

    const auto solver = detail::make_solver(spec, radius, N + M, opts);
    const auto dirs = sample_directions(P, d, seed);

    SumResult result;
    result.method = "slice";
    result.P = P;
    result.num_coeffs = solver.coeffs.size();
    result.tau = solver.tau;
    result.t_setup_s = detail::seconds_since(t_start);

    std::vector<double> acc(M, 0.0);
    std::vector<double> xi_t, shift(B), px(N * B), py(M * B);
    std::vector<std::vector<double>> slice_out(B);
    for (std::size_t p0 = 0; p0 < P; p0 += B) {
        const std::size_t nb = std::min(B, P - p0);
        const auto t_proj = Clock::now();
        xi_t.assign(static_cast<std::size_t>(d) * nb, 0.0);
        for (std::size_t b = 0; b < nb; ++b) {
            const auto xi = dirs[p0 + b];
            double s = 0.0;
            for (int k = 0; k < d; ++k) {
                xi_t[k * nb + b] = xi[k];
                s += xi[k] * mean[k];
            }
            shift[b] = s;
        }
        project_block_by_slice(x, xi_t.data(), nb, shift.data(), px.data());
        project_block_by_slice(y, xi_t.data(), nb, shift.data(), py.data());
        result.t_project_s += detail::seconds_since(t_proj);

        const auto t_sum = Clock::now();
        parallel_for(nb, [&](std::size_t lo, std::size_t hi) {
            std::vector<double> sx(N), sy(M);
            for (std::size_t b = lo; b < hi; ++b) {
                sx.assign(px.begin() + b * N, px.begin() + (b + 1) * N);
                sy.assign(py.begin() + b * M, py.begin() + (b + 1) * M);
                slice_out[b] = solver.solve(sx, sy, w);
            }
        });
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t m = 0; m < M; ++m) acc[m] += slice_out[b][m];
        result.t_fastsum_s += detail::seconds_since(t_sum);
    }
    const double invP = 1.0 / static_cast<double>(P);
    result.values.resize(M);
    for (std::size_t m = 0; m < M; ++m) result.values[m] = acc[m] * invP;
    result.t_total_s = detail::seconds_since(t_start);
    return result;
}

/// True when the slicing bound for this kernel rests on the unproven
/// assumption |f| <= 1 rather than a theorem.
inline bool slicing_error_bound_is_heuristic(const KernelSpec& spec) {
    return !(spec.is<Gaussian>() || spec.is<NegativeDistance>());
}

/// Expected per-pair slicing error bound: √(2π)·C/√P with C = 1 for bounded
/// counterparts, and √8·π·Γ((d+1)/2)·diam/(Γ(d/2)·√P) for the negative distance.
inline double slicing_error_bound(const KernelSpec& spec, std::size_t P, double diam) {
    if (P < 1) throw DomainError("slicing_error_bound: P must be >= 1");
    if (!(diam >= 0.0)) throw DomainError("slicing_error_bound: diam must be non-negative");
    const double root_p = std::sqrt(static_cast<double>(P));
    if (spec.is<NegativeDistance>())
        return std::sqrt(8.0) * std::numbers::pi * specfun::gamma_ratio((spec.d + 1) / 2.0, spec.d / 2.0) * diam / root_p;
    return std::sqrt(2.0 * std::numbers::pi) / root_p;
}

}  // namespace kernelsum
