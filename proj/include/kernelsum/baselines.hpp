#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "kernels.hpp"
#include "numeric.hpp"
#include "points.hpp"
#include "random.hpp"
#include "specfun.hpp"

namespace kernelsum {

namespace detail {

/// F as a function of the squared distance, with per-kernel constants
/// hoisted out of the pair loop.
class RadialProfile {
public:
    explicit RadialProfile(const KernelSpec& spec) : spec_(spec) {
        if (spec.is<Gaussian>()) {
            const double s = spec.as<Gaussian>().sigma;
            c_ = -0.5 / (s * s);
        } else if (spec.is<Laplacian>()) {
            c_ = -spec.as<Laplacian>().alpha;
        } else if (spec.is<Riesz>()) {
            c_ = 0.5 * spec.as<Riesz>().r;
        } else if (spec.is<Matern>()) {
            const auto& m = spec.as<Matern>();
            c_ = std::sqrt(2.0 * m.p + 1.0) / m.beta;  // y/2 = c·s
            const double front = specfun::log_gamma(m.p + 1.0) - specfun::log_gamma(2.0 * m.p + 1.0);
            for (int n = 0; n <= m.p; ++n)
                poly_.push_back(std::exp(front + specfun::log_gamma(m.p + n + 1.0) - specfun::log_gamma(n + 1.0) -
                                         specfun::log_gamma(m.p - n + 1.0)));
        }
    }

    double operator()(double s2) const {
        return std::visit(
            [&](const auto& k) -> double {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Gaussian>) {
                    return std::exp(c_ * s2);
                } else if constexpr (std::is_same_v<K, Laplacian>) {
                    return std::exp(c_ * std::sqrt(s2));
                } else if constexpr (std::is_same_v<K, Matern>) {
                    // exp(−y/2)·Σ_n poly_n·y^{p−n}, with y = 2c·s, by Horner in y.
                    const double y = 2.0 * c_ * std::sqrt(s2);
                    double acc = 0.0;
                    for (double coef : poly_) acc = acc * y + coef;
                    return acc * std::exp(-0.5 * y);
                } else if constexpr (std::is_same_v<K, NegativeDistance>) {
                    return -std::sqrt(s2);
                } else if constexpr (std::is_same_v<K, Riesz>) {
                    return -std::pow(s2, c_);
                } else {
                    return s2 > 0.0 ? 0.5 * s2 * std::log(s2) : 0.0;
                }
            },
            spec_.family);
    }

    bool is_gaussian() const { return spec_.is<Gaussian>(); }
    double gaussian_factor() const { return c_; }

private:
    KernelSpec spec_;
    double c_ = 0.0;
    std::vector<double> poly_;
};

}  // namespace detail

/// Ground truth s_m = Σ_n w_n F(‖x_n − y_m‖) by the O(NMd) double loop,
/// with compensated accumulation over n.
inline std::vector<double> exact_sum(const KernelSpec& spec, const PointSet& x, const PointSet& y,
                                     std::span<const double> w) {
    if (x.d != spec.d || y.d != spec.d) throw ContractError("exact_sum: point dimension does not match kernel");
    if (w.size() != x.n) throw ContractError("exact_sum: weights and sources differ in length");
    const std::size_t N = x.n, M = y.n;
    const int d = spec.d;
    const detail::RadialProfile F(spec);

    // Sources transposed (d×N) so the distance loop runs over contiguous n.
    std::vector<double> xt(static_cast<std::size_t>(d) * N);
    for (std::size_t i = 0; i < N; ++i)
        for (int k = 0; k < d; ++k) xt[static_cast<std::size_t>(k) * N + i] = x.coords[i * d + k];

    // Targets are processed in tiles of kTile so that every source coordinate
    // loaded serves kTile pairs, and sources in chunks small enough to stay in
    // cache across tiles. Each target still accumulates over n in ascending
    // order, so the result depends on neither the tiling nor the thread count.
    constexpr std::size_t kTile = 8;
    constexpr std::size_t kBlock = 256;
    const std::size_t chunk = std::max(kBlock, (std::size_t{1} << 16) / static_cast<std::size_t>(d) / kBlock * kBlock);
    const std::size_t tiles = (M + kTile - 1) / kTile;
    std::vector<CompensatedSum> acc(M);
    for (std::size_t c0 = 0; c0 < N; c0 += chunk) {
        const std::size_t c1 = std::min(N, c0 + chunk);
        parallel_for(tiles, [&](std::size_t lo, std::size_t hi) {
            std::vector<double> dist2(kTile * kBlock), val(kBlock);
            std::vector<double> yt(static_cast<std::size_t>(d) * kTile);
            for (std::size_t tile = lo; tile < hi; ++tile) {
                const std::size_t m0 = tile * kTile;
                const std::size_t mt = std::min(kTile, M - m0);
                // Target coordinates, k-major; a short tile repeats its last target.
                for (int k = 0; k < d; ++k)
                    for (std::size_t j = 0; j < kTile; ++j)
                        yt[static_cast<std::size_t>(k) * kTile + j] = y.coords[(m0 + std::min(j, mt - 1)) * d + k];
                for (std::size_t n0 = c0; n0 < c1; n0 += kBlock) {
                    const std::size_t nb = std::min(kBlock, c1 - n0);
                    double* __restrict d2 = dist2.data();
                    std::fill(d2, d2 + kTile * kBlock, 0.0);
                    for (int k = 0; k < d; ++k) {
                        const double* __restrict yk = yt.data() + static_cast<std::size_t>(k) * kTile;
                        const double* __restrict col = xt.data() + static_cast<std::size_t>(k) * N + n0;
                        for (std::size_t i = 0; i < nb; ++i) {
                            const double xi = col[i];
                            for (std::size_t j = 0; j < kTile; ++j) {
                                const double diff = xi - yk[j];
                                d2[j * kBlock + i] += diff * diff;
                            }
                        }
                    }
                    for (std::size_t j = 0; j < mt; ++j) {
                        const double* __restrict row = d2 + j * kBlock;
                        double* __restrict v = val.data();
                        if (F.is_gaussian()) {
                            const double c = F.gaussian_factor();
                            for (std::size_t i = 0; i < nb; ++i) v[i] = std::exp(c * row[i]);
                        } else {
                            for (std::size_t i = 0; i < nb; ++i) v[i] = F(row[i]);
                        }
                        CompensatedSum& a = acc[m0 + j];
                        for (std::size_t i = 0; i < nb; ++i) a.add(w[n0 + i] * v[i]);
                    }
                }
            }
        });
    }
    std::vector<double> out(M);
    for (std::size_t m = 0; m < M; ++m) out[m] = acc[m].value();
    return out;
}

/// Frequencies v_p (and, for the first estimator, phases b_p) drawn from the
/// spectral measure of a positive definite kernel, in the convention
/// F(‖z‖) = E[cos(2π⟨z, v⟩)].
struct SpectralSample {
    int d = 0;
    std::size_t D = 0;
    std::uint64_t seed = 0;
    std::vector<double> frequencies;  // D×d, row-major
    std::vector<double> phases;       // D entries for variant 1, empty otherwise

    bool has_phases() const { return !phases.empty(); }
};

/// Gaussian: v = g/(2πσ). Laplacian: v = α·g/(2π|z₀|) (multivariate Cauchy).
/// Matérn ν = p + 1/2: v = √(2ν)·g/(2πβ√q) with q ~ χ²_{2ν} (multivariate
/// Student-t with 2ν degrees of freedom). Here g ~ N(0, I_d), z₀ ~ N(0, 1).
inline SpectralSample sample_spectral(const KernelSpec& spec, std::size_t D, std::uint64_t seed, int variant = 2) {
    if (D < 1) throw DomainError("sample_spectral: D must be >= 1");
    if (variant != 1 && variant != 2) throw DomainError("sample_spectral: variant must be 1 or 2");
    if (!(spec.is<Gaussian>() || spec.is<Laplacian>() || spec.is<Matern>()))
        throw UnsupportedKernelError("sample_spectral: random Fourier features need a positive definite kernel, got " +
                                     spec.name());
    const int d = spec.d;
    SpectralSample s{d, D, seed, std::vector<double>(D * static_cast<std::size_t>(d)), {}};
    for (std::size_t p = 0; p < D; ++p) {
        double* v = s.frequencies.data() + p * d;
        RandomStream(seed, stream_id(StreamTag::rff_frequencies, p)).normals(0, static_cast<std::size_t>(d), v);
        const RandomStream radial(seed, stream_id(StreamTag::rff_radial, p));
        double scale = 0.0;
        if (spec.is<Gaussian>()) {
            scale = 1.0 / (2.0 * std::numbers::pi * spec.as<Gaussian>().sigma);
        } else if (spec.is<Laplacian>()) {
            scale = spec.as<Laplacian>().alpha / (2.0 * std::numbers::pi * std::abs(radial.normal(0)));
        } else {
            const auto& m = spec.as<Matern>();
            const int dof = 2 * m.p + 1;
            double q = 0.0;
            for (int i = 0; i < dof; ++i) {
                const double z = radial.normal(static_cast<std::uint64_t>(i));
                q += z * z;
            }
            scale = std::sqrt(static_cast<double>(dof)) / (2.0 * std::numbers::pi * m.beta * std::sqrt(q));
        }
        for (int k = 0; k < d; ++k) v[k] *= scale;
    }
    if (variant == 1) {
        s.phases.resize(D);
        const RandomStream ph(seed, stream_id(StreamTag::rff_phases, 0));
        for (std::size_t p = 0; p < D; ++p) s.phases[p] = 2.0 * std::numbers::pi * ph.uniform(p);
    }
    return s;
}

/// Random Fourier feature estimate of Σ_n w_n K(x_n, y_m).
/// Variant 1: (2/D)·Σ_p cos(2π⟨y,v_p⟩ + b_p)·Σ_n w_n cos(2π⟨x_n,v_p⟩ + b_p).
/// Variant 2: (1/D)·Σ_p [cos(2π⟨y,v_p⟩)·C_p + sin(2π⟨y,v_p⟩)·S_p] with
/// C_p, S_p the weighted cosine and sine sums over the sources.
inline std::vector<double> rff_sum(const SpectralSample& sample, int variant, const PointSet& x, const PointSet& y,
                                   std::span<const double> w) {
    if (variant != 1 && variant != 2) throw DomainError("rff_sum: variant must be 1 or 2");
    if (variant == 1 && !sample.has_phases()) throw ContractError("rff_sum: variant 1 needs a sample drawn with phases");
    if (x.d != sample.d || y.d != sample.d) throw ContractError("rff_sum: dimension mismatch");
    if (w.size() != x.n) throw ContractError("rff_sum: weights and sources differ in length");
    const std::size_t D = sample.D, N = x.n, M = y.n;
    const int d = sample.d;
    constexpr std::size_t kBlock = 64;

    std::vector<double> out(M, 0.0);
    std::vector<double> vt, px, py, shift(kBlock), cs(kBlock), sn(kBlock);
    for (std::size_t p0 = 0; p0 < D; p0 += kBlock) {
        const std::size_t nb = std::min(kBlock, D - p0);
        vt.assign(static_cast<std::size_t>(d) * nb, 0.0);
        for (std::size_t b = 0; b < nb; ++b)
            for (int k = 0; k < d; ++k)
                vt[static_cast<std::size_t>(k) * nb + b] = 2.0 * std::numbers::pi * sample.frequencies[(p0 + b) * d + k];
        for (std::size_t b = 0; b < nb; ++b) shift[b] = variant == 1 ? -sample.phases[p0 + b] : 0.0;
        px.resize(N * nb);
        py.resize(M * nb);
        project_block(x, vt.data(), nb, shift.data(), px.data());
        project_block(y, vt.data(), nb, shift.data(), py.data());
        for (std::size_t b = 0; b < nb; ++b) {
            CompensatedSum c, s;
            for (std::size_t i = 0; i < N; ++i) {
                const double a = px[i * nb + b];
                c.add(w[i] * std::cos(a));
                if (variant == 2) s.add(w[i] * std::sin(a));
            }
            cs[b] = c.value();
            sn[b] = s.value();
        }
        parallel_for(M, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t m = lo; m < hi; ++m) {
                double acc = 0.0;
                for (std::size_t b = 0; b < nb; ++b) {
                    const double a = py[m * nb + b];
                    acc += variant == 1 ? std::cos(a) * cs[b] : std::cos(a) * cs[b] + std::sin(a) * sn[b];
                }
                out[m] += acc;
            }
        });
    }
    const double norm = (variant == 1 ? 2.0 : 1.0) / static_cast<double>(D);
    for (double& v : out) v *= norm;
    return out;
}

/// ‖s_true − s_approx‖₁ / (M·Σ|w_n|).
inline double per_summand_error(std::span<const double> truth, std::span<const double> approx,
                                std::span<const double> w) {
    if (truth.size() != approx.size()) throw ContractError("per_summand_error: length mismatch");
    if (truth.empty()) return 0.0;
    CompensatedSum diff, mass;
    for (std::size_t m = 0; m < truth.size(); ++m) diff.add(std::abs(truth[m] - approx[m]));
    for (double v : w) mass.add(std::abs(v));
    if (mass.value() == 0.0) return diff.value() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff.value() / (static_cast<double>(truth.size()) * mass.value());
}

}  // namespace kernelsum
