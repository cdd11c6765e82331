#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "errors.hpp"
#include "fourier_coeffs.hpp"
#include "kernels.hpp"
#include "numeric.hpp"
#include "nufft.hpp"

namespace kernelsum {

/// Affine map x ↦ τ(x − offset) into [−T, T].
struct Rescaling {
    double tau = 1.0;
    double offset = 0.0;
    double T = 0.2;

    double apply(double x) const { return tau * (x - offset); }
};

struct RescaledData {
    std::vector<double> x, y;
    Rescaling map;
};

/// Map for data in [cmin, cmax]: τ = 2T/(cmax − cmin), capped by tau_cap,
/// centered at the midpoint. A zero-width range gives τ = min(1, tau_cap).
inline Rescaling make_rescaling(double cmin, double cmax, double T = 0.2,
                                double tau_cap = std::numeric_limits<double>::infinity()) {
    if (!(T > 0.0 && T < 0.25)) throw DomainError("rescale: T must lie in (0, 0.25)");
    if (!std::isfinite(cmin) || !std::isfinite(cmax)) throw DomainError("rescale: non-finite input");
    if (!(tau_cap > 0.0)) throw DomainError("rescale: tau cap must be positive");
    Rescaling r;
    r.T = T;
    r.offset = 0.5 * (cmin + cmax);
    const double width = cmax - cmin;
    r.tau = std::min(width > 0.0 ? 2.0 * T / width : 1.0, tau_cap);
    return r;
}

/// Largest admissible τ for the analytic Gaussian coefficients: the rescaled
/// counterpart φ(x) = f(x/τ) must have decayed below 1e-10 within half a period.
inline double rescale_tau_cap(const KernelSpec& spec) {
    if (!spec.is<Gaussian>()) return std::numeric_limits<double>::infinity();
    return 1.0 / (2.0 * spec.as<Gaussian>().sigma * gaussian_decay_radius(spec.d));
}

inline RescaledData rescale(std::span<const double> x, std::span<const double> y, double T = 0.2,
                            double tau_cap = std::numeric_limits<double>::infinity()) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : x) {
        if (!std::isfinite(v)) throw DomainError("rescale: non-finite input");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw DomainError("rescale: non-finite input");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (x.empty() && y.empty()) lo = hi = 0.0;
    RescaledData out;
    out.map = make_rescaling(lo, hi, T, tau_cap);
    out.x.resize(x.size());
    out.y.resize(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) out.x[i] = out.map.apply(x[i]);
    for (std::size_t i = 0; i < y.size(); ++i) out.y[i] = out.map.apply(y[i]);
    return out;
}

/// Rescaling suited to `spec`: Gaussian maps respect rescale_tau_cap.
inline RescaledData rescale(std::span<const double> x, std::span<const double> y, const KernelSpec& spec, double T = 0.2) {
    return rescale(x, y, T, rescale_tau_cap(spec));
}

enum class Engine { ndft, nfft, automatic };

namespace detail {

inline constexpr double kNfftAccuracy = 1e-8;

/// Cheaper engine for one adjoint+forward pair given the node counts.
inline Engine choose_engine(const FourierCoeffSet& coeffs, std::size_t nodes) {
    const double half = 0.5 * static_cast<double>(coeffs.size()) + 1.0;
    const double ndft_cost = static_cast<double>(nodes) * half;
    const double K = coeffs.max_frequency();
    double n = 16;
    while (n < 4.0 * (K + 1.0)) n *= 2.0;
    const double nfft_cost = static_cast<double>(nodes) * 24.0 + 4.0 * n * std::log2(n);
    return ndft_cost <= nfft_cost ? Engine::ndft : Engine::nfft;
}

inline std::vector<double> fourier_fastsum_unchecked(const nufft::Grid1D& gx, const nufft::Grid1D& gy,
                                                     std::span<const double> w, const FourierCoeffSet& coeffs,
                                                     Engine engine) {
    if (engine == Engine::automatic) engine = choose_engine(coeffs, gx.size() + gy.size());
    if (engine == Engine::ndft) {
        auto spec = nufft::ndft_adjoint(gx, w, coeffs.frequencies);
        for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= coeffs.coeffs[i];
        return nufft::ndft_forward(gy, spec, coeffs.frequencies);
    }
    const int K = coeffs.max_frequency();
    // Each plan serves a single transform, so the window tables are not stored.
    nufft::NfftPlan px(gx, K, {kNfftAccuracy, 0, false});
    nufft::NfftPlan py(gy, K, {kNfftAccuracy, 0, false});
    auto spec = px.adjoint(w);
    // Scatter the (possibly sparse) coefficient set onto the band −K..K.
    std::vector<double> band(2 * static_cast<std::size_t>(K) + 1, 0.0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) band[coeffs.frequencies[i] + K] = coeffs.coeffs[i];
    for (std::size_t i = 0; i < band.size(); ++i) spec[i] *= band[i];
    return py.forward(spec);
}

}  // namespace detail

/// t_m = Σ_n w_n φ(x̃_n − ỹ_m) through the truncated Fourier series of φ:
/// t = F_{C,y}(c ⊙ F^H_{C,x} w). Inputs must already be rescaled by `map`,
/// and `coeffs` must have been built for the same τ.
inline std::vector<double> fourier_fastsum(std::span<const double> x, std::span<const double> y,
                                           std::span<const double> w, const FourierCoeffSet& coeffs,
                                           const Rescaling& map, Engine engine = Engine::automatic) {
    if (w.size() != x.size()) throw ContractError("fourier_fastsum: weights and sources differ in length");
    if (std::abs(coeffs.tau - map.tau) > 1e-12 * map.tau)
        throw ContractError("fourier_fastsum: coefficients were built for a different rescaling");
    coeffs.validate();
    nufft::Grid1D gx({x.begin(), x.end()});
    nufft::Grid1D gy({y.begin(), y.end()});
    return detail::fourier_fastsum_unchecked(gx, gy, w, coeffs, engine);
}

/// Sorting algorithm for t_m = −Σ_n c_d v_n |z_n − z_m| on non-decreasing z:
/// a = cumsum(c_d v), ã_i = a_i (z_{i+1} − z_i), b = cumsum(ã) with b_0 = 0,
/// t_m = b_{L−1} − 2 b_{m−1} − a_L (z_L − z_m)  (1-based, L = |z|).
inline std::vector<double> negdist_fastsum_sorted(std::span<const double> z, std::span<const double> v, double c_d) {
    const std::size_t L = z.size();
    if (v.size() != L) throw ContractError("negdist_fastsum_sorted: z and v differ in length");
    for (std::size_t i = 1; i < L; ++i)
        if (z[i] < z[i - 1]) throw ContractError("negdist_fastsum_sorted: z must be non-decreasing");
    std::vector<double> t(L, 0.0);
    if (L == 0) return t;

    std::vector<double> a(L), b(L + 1, 0.0);  // b[i] holds b_i, i = 0..L
    CompensatedSum acc_a;
    for (std::size_t i = 0; i < L; ++i) {
        acc_a.add(c_d * v[i]);
        a[i] = acc_a.value();
    }
    CompensatedSum acc_b;
    for (std::size_t i = 1; i < L; ++i) {
        acc_b.add(a[i - 1] * (z[i] - z[i - 1]));
        b[i] = acc_b.value();
    }
    const double bL1 = b[L - 1];
    const double aL = a[L - 1];
    for (std::size_t m = 1; m <= L; ++m) t[m - 1] = bL1 - 2.0 * b[m - 1] - aL * (z[L - 1] - z[m - 1]);
    return t;
}

/// −Σ_n c_d w_n |x_n − y_m| for all m in O((N+M) log(N+M)).
inline std::vector<double> negdist_fastsum(std::span<const double> x, std::span<const double> y,
                                           std::span<const double> w, int d) {
    if (w.size() != x.size()) throw ContractError("negdist_fastsum: weights and sources differ in length");
    const std::size_t M = y.size(), N = x.size(), L = M + N;
    std::vector<double> z(L);
    for (std::size_t i = 0; i < M; ++i) z[i] = y[i];
    for (std::size_t i = 0; i < N; ++i) {
        if (!std::isfinite(x[i])) throw DomainError("negdist_fastsum: non-finite input");
        z[M + i] = x[i];
    }
    std::vector<std::size_t> perm(L);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });
    std::vector<double> zs(L), vs(L);
    for (std::size_t i = 0; i < L; ++i) {
        zs[i] = z[perm[i]];
        vs[i] = perm[i] < M ? 0.0 : w[perm[i] - M];
    }
    const auto ts = negdist_fastsum_sorted(zs, vs, negdist_constant(d));
    std::vector<double> t(M);
    for (std::size_t i = 0; i < L; ++i)
        if (perm[i] < M) t[perm[i]] = ts[i];
    return t;
}

/// Laplacian sum Σ_n w_n f(|x_n − y_m|) split into the smooth part
/// exp(−α‖·‖) + α‖·‖ (Fourier path) and −α‖·‖ (sorting path).
/// `coeffs_smooth` carries its τ; the data are centered and scaled by it.
inline std::vector<double> laplace_fastsum(std::span<const double> x, std::span<const double> y,
                                           std::span<const double> w, double alpha, int d,
                                           const FourierCoeffSet& coeffs_smooth, Engine engine = Engine::automatic) {
    if (!(alpha > 0.0)) throw DomainError("laplace_fastsum: alpha must be positive");
    if (w.size() != x.size()) throw ContractError("laplace_fastsum: weights and sources differ in length");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : x) lo = std::min(lo, v), hi = std::max(hi, v);
    for (double v : y) lo = std::min(lo, v), hi = std::max(hi, v);
    if (x.empty() && y.empty()) lo = hi = 0.0;
    Rescaling map{coeffs_smooth.tau, 0.5 * (lo + hi), 0.2};
    if (map.tau * (hi - lo) >= 0.5)
        throw ContractError("laplace_fastsum: coefficient scale too large for the data spread");
    std::vector<double> xs(x.size()), ys(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) xs[i] = map.apply(x[i]);
    for (std::size_t i = 0; i < y.size(); ++i) ys[i] = map.apply(y[i]);
    auto t = fourier_fastsum(xs, ys, w, coeffs_smooth, map, engine);
    const auto t2 = negdist_fastsum(x, y, w, d);
    for (std::size_t m = 0; m < t.size(); ++m) t[m] += alpha * t2[m];
    return t;
}

}  // namespace kernelsum
