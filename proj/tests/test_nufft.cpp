#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "kernelsum/nufft.hpp"

using namespace kernelsum;
using namespace kernelsum::nufft;

namespace {

std::vector<int> band(int K) {
    std::vector<int> f;
    for (int k = -K; k <= K; ++k) f.push_back(k);
    return f;
}

std::vector<double> random_nodes(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::vector<double> x(n);
    for (double& v : x) v = u(rng);
    return x;
}

// Reference double loops in extended precision, so that the rounding of k·x
// and of the trigonometric argument stays below the tolerance under test.
using lcplx = std::complex<long double>;

lcplx unit(long double k, long double x, long double sign) {
    const long double kx = k * x;
    return std::polar(1.0L, sign * 2 * std::numbers::pi_v<long double> * (kx - std::nearbyint(kx)));
}

SpectralVector brute_adjoint(const std::vector<double>& x, const std::vector<double>& w, const std::vector<int>& f) {
    SpectralVector out;
    for (int k : f) {
        lcplx acc{};
        for (std::size_t n = 0; n < x.size(); ++n) acc += static_cast<long double>(w[n]) * unit(k, x[n], -1);
        out.values.emplace_back(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }
    return out;
}

std::vector<double> brute_forward(const std::vector<double>& y, const SpectralVector& v, const std::vector<int>& f) {
    std::vector<double> out;
    for (double ym : y) {
        lcplx acc{};
        for (std::size_t i = 0; i < f.size(); ++i) acc += lcplx(v[i].real(), v[i].imag()) * unit(f[i], ym, 1);
        out.push_back(static_cast<double>(acc.real()));
    }
    return out;
}

SpectralVector hermitian_spectrum(std::mt19937_64& rng, int K) {
    std::normal_distribution<double> g;
    SpectralVector v;
    v.values.resize(2 * K + 1);
    for (int k = 0; k <= K; ++k) {
        const cplx c{g(rng), k == 0 ? 0.0 : g(rng)};
        v[K + k] = c;
        v[K - k] = std::conj(c);
    }
    return v;
}

}  // namespace

TEST(Grid, RejectsNodesOutsideTorus) {
    EXPECT_THROW(Grid1D({0.5}), DomainError);
    EXPECT_THROW(Grid1D({-0.6}), DomainError);
    EXPECT_THROW(Grid1D({std::nan("")}), DomainError);
    EXPECT_NO_THROW(Grid1D({-0.5, 0.0, 0.4999}));
}

TEST(NdftAdjoint, SingleNodeAtOrigin) {
    const auto f = band(5);
    const auto s = ndft_adjoint(Grid1D({0.0}), std::vector<double>{1.0}, f);
    for (const auto& v : s.values) EXPECT_NEAR(std::abs(v - cplx{1.0, 0.0}), 0.0, 1e-15);
}

TEST(NdftAdjoint, EquispacedNodesGiveClassicalDft) {
    const int N = 16;
    std::vector<double> x(N), w(N);
    for (int n = 0; n < N; ++n) {
        x[n] = static_cast<double>(n) / N - 0.5;
        w[n] = std::sin(0.7 * n) + 0.1 * n;
    }
    const auto f = band(7);
    const auto s = ndft_adjoint(Grid1D(x), w, f);
    for (std::size_t i = 0; i < f.size(); ++i) {
        cplx dft{};
        for (int n = 0; n < N; ++n) dft += w[n] * std::polar(1.0, -2 * std::numbers::pi * f[i] * n / N);
        const double sign = f[i] % 2 == 0 ? 1.0 : -1.0;  // e^{−2πik(−1/2)}
        EXPECT_NEAR(std::abs(s[i] - sign * dft), 0.0, 1e-12);
    }
}

TEST(NdftAdjoint, MatchesDoubleLoop) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_nodes(rng, 7 + trial);
        std::vector<double> w(x.size());
        for (double& v : w) v = g(rng);
        // Symmetric band, a sparse symmetric set, and an asymmetric list.
        for (const auto& f : {band(150), std::vector<int>{-90, -3, -2, 2, 3, 90}, std::vector<int>{-4, 1, 7, 8, 300}}) {
            const auto s = ndft_adjoint(Grid1D(x), w, f);
            const auto ref = brute_adjoint(x, w, f);
            for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(std::abs(s[i] - ref[i]), 0.0, 1e-13);
        }
    }
}

TEST(NdftForward, ZeroAndCosine) {
    const auto f = band(3);
    const Grid1D y({-0.4, -0.1, 0.0, 0.3});
    SpectralVector zero;
    zero.values.assign(f.size(), cplx{});
    for (double t : ndft_forward(y, zero, f)) EXPECT_EQ(t, 0.0);
    SpectralVector c = zero;
    c[2] = c[4] = 0.5;
    const auto t = ndft_forward(y, c, f);
    for (std::size_t m = 0; m < y.size(); ++m) EXPECT_NEAR(t[m], std::cos(2 * std::numbers::pi * y[m]), 1e-15);
}

TEST(NdftForward, MatchesDoubleLoop) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto y = random_nodes(rng, 5 + 3 * trial);
        const auto f = band(100 + trial);
        const auto v = hermitian_spectrum(rng, f.back());
        const auto t = ndft_forward(Grid1D(y), v, f);
        const auto ref = brute_forward(y, v, f);
        for (std::size_t m = 0; m < y.size(); ++m) EXPECT_NEAR(t[m], ref[m], 1e-13 * (1 + std::abs(ref[m])));
    }
}

TEST(NdftForward, RejectsNonHermitianSpectrum) {
    const auto f = band(2);
    SpectralVector v;
    v.values = {1.0, 0.0, 0.0, 0.0, 2.0};
    EXPECT_THROW(ndft_forward(Grid1D({0.1}), v, f), ContractError);
    v.values.pop_back();
    EXPECT_THROW(ndft_forward(Grid1D({0.1}), v, f), ContractError);
}

TEST(Ndft, AdjointnessIdentity) {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    const auto y = random_nodes(rng, 300);
    const auto f = band(64);
    std::vector<double> u(y.size());
    for (double& v : u) v = g(rng);
    const auto v = hermitian_spectrum(rng, 64);
    const auto t = ndft_forward(Grid1D(y), v, f);
    const auto a = ndft_adjoint(Grid1D(y), u, f);
    double lhs = 0.0, scale = 0.0;
    for (std::size_t m = 0; m < y.size(); ++m) lhs += t[m] * u[m], scale += std::abs(t[m] * u[m]);
    cplx rhs{};
    for (std::size_t i = 0; i < f.size(); ++i) rhs += v[i] * std::conj(a[i]);
    EXPECT_NEAR(lhs, rhs.real(), 1e-12 * scale);
}

TEST(NfftPlan, CutoffDerivedFromAccuracy) {
    NfftPlan plan(Grid1D({0.0}), 64);
    EXPECT_GE(plan.fft_length(), 4u * 65u);
    EXPECT_LE(gaussian_window_error(static_cast<double>(plan.fft_length()) / 130.0, plan.cutoff()), 1e-8);
    EXPECT_THROW(NfftPlan(Grid1D({0.0}), 64, {1e-8, 2}), ConfigurationError);
    EXPECT_THROW(NfftPlan(Grid1D({0.0}), -1), DomainError);
    EXPECT_THROW(NfftPlan(Grid1D({0.0}), 4, {0.0, 0}), DomainError);
}

TEST(NfftPlan, DegenerateBandIsExactSum) {
    const std::vector<double> x{-0.3, 0.1, 0.45}, w{1.0, 2.0, -0.5};
    const auto s = nfft_adjoint(Grid1D(x), w, band(0));
    ASSERT_EQ(s.size(), 1u);
    EXPECT_NEAR(s[0].real(), 2.5, 1e-8 * 3.5);
    EXPECT_NEAR(s[0].imag(), 0.0, 1e-8 * 3.5);
}

TEST(NfftPlan, ZeroWeightsGiveZeroSpectrum) {
    std::mt19937_64 rng(14);
    const auto x = random_nodes(rng, 50);
    const auto s = nfft_adjoint(Grid1D(x), std::vector<double>(50, 0.0), band(20));
    for (const auto& v : s.values) EXPECT_EQ(std::abs(v), 0.0);
}

TEST(NfftPlan, MatchesNdft) {
    std::mt19937_64 rng(15);
    std::normal_distribution<double> g;
    for (int K : {1, 16, 256, 1000}) {
        const auto x = random_nodes(rng, 700);
        std::vector<double> w(x.size());
        double l1 = 0.0;
        for (double& v : w) v = g(rng), l1 += std::abs(v);
        const auto f = band(K);
        NfftPlan plan(Grid1D(x), K);
        const auto fast = plan.adjoint(w);
        const auto exact = ndft_adjoint(Grid1D(x), w, f);
        double dev = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) dev = std::max(dev, std::abs(fast[i] - exact[i]));
        EXPECT_LE(dev, 1e-8 * l1) << "adjoint K=" << K;

        const auto v = hermitian_spectrum(rng, K);
        double v1 = 0.0;
        for (const auto& c : v.values) v1 += std::abs(c);
        const auto tf = plan.forward(v);
        const auto te = ndft_forward(Grid1D(x), v, f);
        dev = 0.0;
        for (std::size_t m = 0; m < x.size(); ++m) dev = std::max(dev, std::abs(tf[m] - te[m]));
        EXPECT_LE(dev, 1e-8 * v1) << "forward K=" << K;
    }
}

TEST(NfftPlan, RejectsNonBandFrequencies) {
    EXPECT_THROW(nfft_adjoint(Grid1D({0.0}), std::vector<double>{1.0}, std::vector<int>{-2, 2}), ContractError);
}
