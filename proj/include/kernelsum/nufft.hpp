#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"

namespace kernelsum::nufft {

using cplx = std::complex<double>;

/// Nodes on the unit torus, stored in [−1/2, 1/2).
class Grid1D {
public:
    Grid1D() = default;

    explicit Grid1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
        for (double x : nodes_)
            if (!(x >= -0.5 && x < 0.5)) throw DomainError("Grid1D: node outside [-1/2, 1/2)");
    }

    std::size_t size() const { return nodes_.size(); }
    const std::vector<double>& nodes() const { return nodes_; }
    double operator[](std::size_t i) const { return nodes_[i]; }

private:
    std::vector<double> nodes_;
};

/// Complex values aligned with a frequency list.
struct SpectralVector {
    std::vector<cplx> values;

    std::size_t size() const { return values.size(); }
    cplx& operator[](std::size_t i) { return values[i]; }
    const cplx& operator[](std::size_t i) const { return values[i]; }
};

namespace detail {

inline bool is_symmetric(std::span<const int> freqs) {
    const std::size_t n = freqs.size();
    for (std::size_t i = 0; i < n; ++i)
        if (freqs[i] != -freqs[n - 1 - i]) return false;
    return std::is_sorted(freqs.begin(), freqs.end());
}

/// Maximal runs of consecutive integers, as [first, last] index pairs into
/// `freqs`.
inline std::vector<std::pair<std::size_t, std::size_t>> runs(std::span<const int> freqs, std::size_t begin) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = begin;
    while (i < freqs.size()) {
        std::size_t j = i;
        while (j + 1 < freqs.size() && freqs[j + 1] == freqs[j] + 1) ++j;
        out.emplace_back(i, j);
        i = j + 1;
    }
    return out;
}

inline constexpr std::size_t kLanes = 8;
inline constexpr int kReseed = 16;

/// Nodes per block in the NDFT loops, so that the phase state of a block
/// stays in cache while the frequencies are swept.
inline constexpr std::size_t kNodeBlock = 2048;

/// Per-node phase state e^{∓2πikx} for a running k over one block of nodes,
/// split into real and imaginary arrays so that the node loops vectorize.
struct PhaseTable {
    std::vector<double> re, im, step_re, step_im;
    const double* nodes = nullptr;
    std::size_t n = 0;
    double sign;

    explicit PhaseTable(double sgn) : sign(sgn) {}

    /// Points the table at nodes[0..count) and recomputes the unit steps.
    void assign(const double* x, std::size_t count) {
        nodes = x;
        n = count;
        re.resize(n);
        im.resize(n);
        step_re.resize(n);
        step_im.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = sign * 2.0 * std::numbers::pi * x[i];
            step_re[i] = std::cos(a);
            step_im[i] = std::sin(a);
        }
    }

    void seed(int k) {
        for (std::size_t i = 0; i < n; ++i) {
            // kx = hi + lo exactly; reduce hi modulo 1 before scaling by 2π.
            const double hi = static_cast<double>(k) * nodes[i];
            const double lo = std::fma(static_cast<double>(k), nodes[i], -hi);
            const double a = sign * 2.0 * std::numbers::pi * ((hi - std::nearbyint(hi)) + lo);
            re[i] = std::cos(a);
            im[i] = std::sin(a);
        }
    }

    void advance() {
        double* __restrict r = re.data();
        double* __restrict m = im.data();
        const double* __restrict sr = step_re.data();
        const double* __restrict si = step_im.data();
        for (std::size_t i = 0; i < n; ++i) {
            const double nr = r[i] * sr[i] - m[i] * si[i];
            const double ni = r[i] * si[i] + m[i] * sr[i];
            r[i] = nr;
            m[i] = ni;
        }
    }
};

/// Σ_i w_i·(re_i + i·im_i), accumulated in kLanes fixed lanes so the loop
/// vectorizes while the summation order stays deterministic.
inline cplx weighted_sum(const double* w, const double* re, const double* im, std::size_t n) {
    double acc_re[kLanes] = {}, acc_im[kLanes] = {};
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
        for (std::size_t l = 0; l < kLanes; ++l) {
            acc_re[l] += w[i + l] * re[i + l];
            acc_im[l] += w[i + l] * im[i + l];
        }
    for (std::size_t l = 0; i + l < n; ++l) {
        acc_re[l] += w[i + l] * re[i + l];
        acc_im[l] += w[i + l] * im[i + l];
    }
    double sr = 0.0, si = 0.0;
    for (std::size_t l = 0; l < kLanes; ++l) {
        sr += acc_re[l];
        si += acc_im[l];
    }
    return {sr, si};
}

}  // namespace detail

/// ŵ_k = Σ_n w_n e^{−2πikx_n} for every k in `freqs`.
inline SpectralVector ndft_adjoint(const Grid1D& grid, std::span<const double> weights, std::span<const int> freqs) {
    if (weights.size() != grid.size()) throw ContractError("ndft_adjoint: weights and grid differ in length");
    SpectralVector out;
    out.values.assign(freqs.size(), cplx{});
    if (freqs.empty() || grid.size() == 0) return out;

    const bool mirror = detail::is_symmetric(freqs);
    const std::size_t first = mirror ? freqs.size() / 2 : 0;  // index of the first k >= 0
    const auto runs = detail::runs(freqs, first);
    detail::PhaseTable phase(-1.0);
    const std::size_t N = grid.size();
    for (std::size_t n0 = 0; n0 < N; n0 += detail::kNodeBlock) {
        const std::size_t nb = std::min(detail::kNodeBlock, N - n0);
        phase.assign(grid.nodes().data() + n0, nb);
        for (auto [b, e] : runs) {
            int since_seed = detail::kReseed;
            for (std::size_t i = b; i <= e; ++i) {
                if (since_seed == detail::kReseed) {
                    phase.seed(freqs[i]);
                    since_seed = 0;
                } else {
                    phase.advance();
                }
                ++since_seed;
                out.values[i] += detail::weighted_sum(weights.data() + n0, phase.re.data(), phase.im.data(), nb);
            }
        }
    }
    if (mirror)
        for (std::size_t i = 0; i < first; ++i) out.values[i] = std::conj(out.values[freqs.size() - 1 - i]);
    return out;
}

/// t_m = Re Σ_k v_k e^{2πiky_m}. The spectrum must be conjugate symmetric
/// (up to 1e-10 relative) so that the discarded imaginary part is negligible.
inline std::vector<double> ndft_forward(const Grid1D& grid, const SpectralVector& spectrum, std::span<const int> freqs) {
    if (spectrum.size() != freqs.size()) throw ContractError("ndft_forward: spectrum and frequency list differ in length");
    const std::size_t M = grid.size();
    std::vector<double> out(M, 0.0);
    if (freqs.empty() || M == 0) return out;

    double scale = 0.0;
    for (const auto& v : spectrum.values) scale += std::abs(v);
    const bool symmetric = detail::is_symmetric(freqs);
    if (symmetric) {
        const std::size_t n = freqs.size();
        for (std::size_t i = 0; i < n / 2; ++i)
            if (std::abs(spectrum[i] - std::conj(spectrum[n - 1 - i])) > 1e-10 * scale)
                throw ContractError("ndft_forward: spectrum is not conjugate symmetric");
    }

    const std::size_t first = symmetric ? freqs.size() / 2 : 0;
    std::vector<double> imag(symmetric ? 0 : M, 0.0);
    const auto runs = detail::runs(freqs, first);
    detail::PhaseTable phase(1.0);
    for (std::size_t m0 = 0; m0 < M; m0 += detail::kNodeBlock) {
        const std::size_t nb = std::min(detail::kNodeBlock, M - m0);
        phase.assign(grid.nodes().data() + m0, nb);
        double* __restrict t = out.data() + m0;
        for (auto [b, e] : runs) {
            int since_seed = detail::kReseed;
            for (std::size_t i = b; i <= e; ++i) {
                if (since_seed == detail::kReseed) {
                    phase.seed(freqs[i]);
                    since_seed = 0;
                } else {
                    phase.advance();
                }
                ++since_seed;
                const double vr = spectrum[i].real(), vi = spectrum[i].imag();
                const double* __restrict r = phase.re.data();
                const double* __restrict m = phase.im.data();
                if (symmetric) {
                    // k and −k together contribute 2·Re(v_k e^{2πiky}); k = 0 once.
                    const double f = freqs[i] == 0 ? 1.0 : 2.0;
                    const double fr = f * vr, fi = f * vi;
                    for (std::size_t j = 0; j < nb; ++j) t[j] += fr * r[j] - fi * m[j];
                } else {
                    double* __restrict q = imag.data() + m0;
                    for (std::size_t j = 0; j < nb; ++j) {
                        t[j] += vr * r[j] - vi * m[j];
                        q[j] += vr * m[j] + vi * r[j];
                    }
                }
            }
        }
    }
    if (!symmetric)
        for (double q : imag)
            if (std::abs(q) > 1e-10 * scale)
                throw ContractError("ndft_forward: output has a non-negligible imaginary part");
    return out;
}

struct NfftOptions {
    /// Target max-abs error relative to the 1-norm of the input.
    double accuracy = 1e-8;
    /// Window half-width in grid cells; 0 derives it from `accuracy`.
    int cutoff = 0;
    /// Store the window weights of every node (fast reuse across many
    /// transforms) or recompute them per transform (no O(N·m) table).
    bool precompute = true;
};

/// Error bound of the Gaussian window with oversampling ratio `os` and
/// half-width m: 4·exp(−mπ(1 − 1/(2·os − 1))).
inline double gaussian_window_error(double os, int m) {
    return 4.0 * std::exp(-m * std::numbers::pi * (1.0 - 1.0 / (2.0 * os - 1.0)));
}

/// Non-equispaced FFT for the band {−K, ..., K} on a fixed grid, using a
/// truncated Gaussian window and an oversampled FFT of length n >= 4(K+1).
/// Window tables are built once; the plan is immutable and can be shared.
class NfftPlan {
public:
    NfftPlan(Grid1D grid, int K, NfftOptions opts = {}) : grid_(std::move(grid)), K_(K) {
        if (K < 0) throw DomainError("NfftPlan: K must be non-negative");
        if (!(opts.accuracy > 0.0 && opts.accuracy < 1.0)) throw DomainError("NfftPlan: accuracy must lie in (0, 1)");
        const std::size_t band = 2 * static_cast<std::size_t>(K) + 2;
        n_ = 16;
        while (n_ < 2 * band) n_ *= 2;
        const double os = static_cast<double>(n_) / static_cast<double>(band);
        if (opts.cutoff > 0) {
            m_ = opts.cutoff;
            if (gaussian_window_error(os, m_) > opts.accuracy)
                throw ConfigurationError("NfftPlan: window cutoff too small for the requested accuracy");
        } else {
            m_ = 1;
            while (gaussian_window_error(os, m_) > opts.accuracy) {
                if (++m_ > 40) throw ConfigurationError("NfftPlan: requested accuracy below attainable level");
            }
        }
        // A wider oversampling only lowers the window error, so small bands
        // grow n until the window fits.
        while (n_ < 4 * static_cast<std::size_t>(m_) + 4) n_ *= 2;
        const double os_final = static_cast<double>(n_) / static_cast<double>(band);
        b_ = 2.0 * os_final * m_ / ((2.0 * os_final - 1.0) * std::numbers::pi);

        width_ = 2 * static_cast<std::size_t>(m_) + 2;
        norm_ = 1.0 / std::sqrt(std::numbers::pi * b_);
        tail_.resize(width_);
        for (std::size_t i = 0; i < width_; ++i) tail_[i] = std::exp(-static_cast<double>(i * i) / b_);
        if (opts.precompute) {
            start_.resize(grid_.size());
            weights_.resize(grid_.size() * width_);
            for (std::size_t j = 0; j < grid_.size(); ++j) start_[j] = window(grid_[j], &weights_[j * width_]);
        }
        deconv_.resize(static_cast<std::size_t>(K) + 1);
        for (int k = 0; k <= K; ++k) {
            const double a = std::numbers::pi * k / static_cast<double>(n_);
            deconv_[k] = std::exp(b_ * a * a);  // 1/(n·φ̂(k))
        }
    }

    int bandwidth() const { return K_; }
    int cutoff() const { return m_; }
    std::size_t fft_length() const { return n_; }
    const Grid1D& grid() const { return grid_; }

    /// ŵ_k for k = −K..K (index k + K).
    SpectralVector adjoint(std::span<const double> w) const {
        if (w.size() != grid_.size()) throw ContractError("NfftPlan::adjoint: weights and grid differ in length");
        auto g = fft::make_buffer(n_);
        const std::size_t mask = n_ - 1;
        std::vector<double> local(weights_.empty() ? width_ : 0);
        for (std::size_t j = 0; j < grid_.size(); ++j) {
            const double wj = w[j];
            if (wj == 0.0) continue;
            const double* phi;
            long l0;
            if (weights_.empty()) {
                l0 = window(grid_[j], local.data());
                phi = local.data();
            } else {
                phi = &weights_[j * width_];
                l0 = start_[j];
            }
            for (std::size_t i = 0; i < width_; ++i) {
                const std::size_t idx = static_cast<std::size_t>(l0 + static_cast<long>(i)) & mask;
                g[idx] += wj * phi[i];
            }
        }
        fft::transform(g.get(), n_, fft::Direction::forward);
        SpectralVector out;
        out.values.resize(2 * static_cast<std::size_t>(K_) + 1);
        for (int k = -K_; k <= K_; ++k) {
            const std::size_t idx = static_cast<std::size_t>(k) & mask;
            out.values[k + K_] = g[idx] * deconv_[std::abs(k)];
        }
        return out;
    }

    /// Re Σ_{k=−K}^{K} v_k e^{2πiky_j} on the plan's grid.
    std::vector<double> forward(const SpectralVector& v) const {
        if (v.size() != 2 * static_cast<std::size_t>(K_) + 1)
            throw ContractError("NfftPlan::forward: spectrum length must be 2K+1");
        auto g = fft::make_buffer(n_);
        const std::size_t mask = n_ - 1;
        for (int k = -K_; k <= K_; ++k) g[static_cast<std::size_t>(k) & mask] = v[k + K_] * deconv_[std::abs(k)];
        fft::transform(g.get(), n_, fft::Direction::backward);
        std::vector<double> out(grid_.size());
        std::vector<double> local(weights_.empty() ? width_ : 0);
        for (std::size_t j = 0; j < grid_.size(); ++j) {
            const double* phi;
            long l0;
            if (weights_.empty()) {
                l0 = window(grid_[j], local.data());
                phi = local.data();
            } else {
                phi = &weights_[j * width_];
                l0 = start_[j];
            }
            double acc = 0.0;
            for (std::size_t i = 0; i < width_; ++i) {
                const std::size_t idx = static_cast<std::size_t>(l0 + static_cast<long>(i)) & mask;
                acc += phi[i] * g[idx].real();
            }
            out[j] = acc;
        }
        return out;
    }

private:
    /// Window weights of node x on grid cells l0, ..., l0 + width − 1; returns l0.
    /// Fast Gaussian gridding: exp(−(δ+i)²/b) = exp(−δ²/b)·q^i·exp(−i²/b) with
    /// q = exp(−2δ/b), so each node needs two exponentials.
    long window(double x, double* phi) const {
        const double u = static_cast<double>(n_) * x;
        const long l0 = static_cast<long>(std::floor(u)) - m_;
        const double delta = static_cast<double>(l0) - u;
        const double q = std::exp(-2.0 * delta / b_);
        double lead = norm_ * std::exp(-delta * delta / b_);
        for (std::size_t i = 0; i < width_; ++i) {
            phi[i] = lead * tail_[i];
            lead *= q;
        }
        return l0;
    }

    Grid1D grid_;
    int K_;
    std::size_t n_ = 0;
    int m_ = 0;
    double b_ = 0.0;
    std::size_t width_ = 0;
    double norm_ = 0.0;
    std::vector<double> tail_;
    std::vector<long> start_;
    std::vector<double> weights_;
    std::vector<double> deconv_;
};

namespace detail {

inline int band_limit(std::span<const int> freqs) {
    if (freqs.empty()) throw ContractError("nfft: empty frequency list");
    const int K = freqs.back();
    if (freqs.size() != 2 * static_cast<std::size_t>(K) + 1) throw ContractError("nfft: frequencies must form a band −K..K");
    for (std::size_t i = 0; i < freqs.size(); ++i)
        if (freqs[i] != static_cast<int>(i) - K) throw ContractError("nfft: frequencies must form a band −K..K");
    return K;
}

}  // namespace detail

inline SpectralVector nfft_adjoint(const Grid1D& grid, std::span<const double> weights, std::span<const int> freqs,
                                   double accuracy = 1e-8) {
    const int K = detail::band_limit(freqs);
    return NfftPlan(grid, K, {accuracy, 0, false}).adjoint(weights);
}

inline std::vector<double> nfft_forward(const Grid1D& grid, const SpectralVector& spectrum, std::span<const int> freqs,
                                        double accuracy = 1e-8) {
    const int K = detail::band_limit(freqs);
    return NfftPlan(grid, K, {accuracy, 0, false}).forward(spectrum);
}

}  // namespace kernelsum::nufft
