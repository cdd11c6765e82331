#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "kernels.hpp"
#include "specfun.hpp"

namespace kernelsum {

/// Truncated Fourier series φ(x) ≈ Σ_k c_k e^{2πikx} on the unit period,
/// where φ(x) = f(|x|/τ) is the rescaled 1D counterpart of `built_for`.
struct FourierCoeffSet {
    std::vector<int> frequencies;  // ascending, symmetric about 0
    std::vector<double> coeffs;    // real, c_k = c_{−k}
    double tau = 1.0;
    double shift = 0.0;
    KernelSpec built_for = KernelSpec::gaussian(1.0, 1);

    std::size_t size() const { return frequencies.size(); }

    int max_frequency() const { return frequencies.empty() ? 0 : frequencies.back(); }

    /// True when the frequencies are exactly {−K, ..., K}.
    bool is_band() const {
        const int K = max_frequency();
        if (frequencies.size() != static_cast<std::size_t>(2 * K + 1)) return false;
        for (std::size_t i = 0; i < frequencies.size(); ++i)
            if (frequencies[i] != static_cast<int>(i) - K) return false;
        return true;
    }

    void validate() const {
        if (frequencies.size() != coeffs.size()) throw ContractError("FourierCoeffSet: size mismatch");
        if (!std::is_sorted(frequencies.begin(), frequencies.end()) ||
            std::adjacent_find(frequencies.begin(), frequencies.end()) != frequencies.end())
            throw ContractError("FourierCoeffSet: frequencies must be strictly increasing");
        const std::size_t n = frequencies.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (frequencies[i] != -frequencies[n - 1 - i])
                throw ContractError("FourierCoeffSet: frequency set is not symmetric");
            if (coeffs[i] != coeffs[n - 1 - i]) throw ContractError("FourierCoeffSet: coefficients are not even");
        }
        if (!(tau > 0.0)) throw ContractError("FourierCoeffSet: tau must be positive");
    }

    /// Σ_k c_k e^{2πikx} (real because the set is even).
    double evaluate(double x) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < frequencies.size(); ++i) {
            const int k = frequencies[i];
            if (k < 0) continue;
            const double c = coeffs[i] * std::cos(2.0 * std::numbers::pi * k * x);
            acc += k == 0 ? c : 2.0 * c;
        }
        return acc;
    }
};

namespace detail {

inline double log_gaussian_coeff(double sigma, int d, double k) {
    const double q = 2.0 * std::numbers::pi * std::numbers::pi * sigma * sigma * k * k;
    double log_c = std::log(d * std::numbers::pi * sigma) - q - 0.5 * std::numbers::ln2 - specfun::log_gamma(0.5 * d + 1.0);
    if (d > 1) log_c += 0.5 * (d - 1) * std::log(q);
    return log_c;
}

}  // namespace detail

/// Fourier transform f̂_σ(k) of the Gaussian counterpart,
/// dπσ·exp(−2π²σ²k²)·(2π²σ²k²)^{(d−1)/2}/(√2·Γ(d/2+1)), assembled in log space.
inline double gaussian_fourier_coeff(double sigma, int d, long k) {
    if (!(sigma > 0.0)) throw DomainError("gaussian_fourier_coeff: sigma must be positive");
    if (d < 1) throw DomainError("gaussian_fourier_coeff: d must be >= 1");
    if (k == 0 && d > 1) return 0.0;
    return std::exp(detail::log_gaussian_coeff(sigma, d, static_cast<double>(k)));
}

/// Smallest K with c_K < eps·max_k c_k, scanning outward from the peak
/// k* = √(d−1)/(2πσ). The coefficients are unimodal in |k|, so the scan is exact.
inline int gaussian_auto_kmax(double sigma, int d, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("gaussian_auto_kmax: eps must lie in (0, 1)");
    const double k_star = std::sqrt(static_cast<double>(d - 1)) / (2.0 * std::numbers::pi * sigma);
    const long k0 = std::max(0L, static_cast<long>(std::floor(k_star)));
    double log_peak = -std::numeric_limits<double>::infinity();
    for (long k = std::max(0L, k0 - 1); k <= k0 + 2; ++k)
        if (k > 0 || d == 1) log_peak = std::max(log_peak, detail::log_gaussian_coeff(sigma, d, double(k)));
    const double log_cut = log_peak + std::log(eps);
    long k = std::max(1L, k0);
    while (detail::log_gaussian_coeff(sigma, d, double(k)) >= log_cut) {
        if (k >= std::numeric_limits<int>::max() / 4)
            throw ConfigurationError("gaussian_auto_kmax: coefficient decay too slow");
        ++k;
    }
    return static_cast<int>(k);
}

/// Thresholded symmetric set {k : |k| <= K_max, c_k > eps·max c} of Gaussian
/// coefficients for width σ in the unit-period variable. K_max = 0 selects
/// the automatic cutoff.
inline FourierCoeffSet select_coeff_set(double sigma, int d, double eps = 1e-10, int kmax = 0) {
    if (!(sigma > 0.0)) throw DomainError("select_coeff_set: sigma must be positive");
    if (!(eps >= 0.0)) throw DomainError("select_coeff_set: eps must be non-negative");
    if (kmax < 0) throw DomainError("select_coeff_set: K_max must be non-negative");
    if (kmax == 0) {
        if (eps == 0.0) throw ConfigurationError("select_coeff_set: automatic K_max needs eps > 0");
        kmax = gaussian_auto_kmax(sigma, d, eps);
    }
    std::vector<double> half(static_cast<std::size_t>(kmax) + 1);
    double peak = 0.0;
    for (int k = 0; k <= kmax; ++k) {
        half[k] = gaussian_fourier_coeff(sigma, d, k);
        peak = std::max(peak, half[k]);
    }
    FourierCoeffSet set;
    set.built_for = KernelSpec::gaussian(sigma, d);
    const double cut = eps * peak;
    for (int k = -kmax; k <= kmax; ++k) {
        const double c = half[std::abs(k)];
        if (c > cut && c > 0.0) {
            set.frequencies.push_back(k);
            set.coeffs.push_back(c);
        }
    }
    if (set.frequencies.empty())
        throw ConfigurationError("select_coeff_set: no coefficient survives the threshold");
    return set;
}

/// Coefficients for a Gaussian kernel after rescaling by τ: the width in the
/// unit-period variable is τσ.
inline FourierCoeffSet select_coeff_set(const KernelSpec& spec, double tau, double eps = 1e-10, int kmax = 0) {
    if (!spec.is<Gaussian>()) throw UnsupportedKernelError("select_coeff_set: analytic coefficients exist only for the Gaussian");
    auto set = select_coeff_set(tau * spec.as<Gaussian>().sigma, spec.d, eps, kmax);
    set.tau = tau;
    set.built_for = spec;
    return set;
}

/// Discrete Fourier coefficients of the periodization of x ↦ phi(|x|/τ)
/// restricted to [−1/2, 1/2), sampled on `grid_size` equispaced points.
template <class Fn>
FourierCoeffSet numeric_fourier_coeffs(Fn&& phi, double tau, int K, int grid_size, const KernelSpec& built_for) {
    if (!(tau > 0.0)) throw DomainError("numeric_fourier_coeffs: tau must be positive");
    if (K < 0) throw DomainError("numeric_fourier_coeffs: K must be non-negative");
    if (grid_size < 8 * std::max(K, 1) || (grid_size & (grid_size - 1)) != 0)
        throw ConfigurationError("numeric_fourier_coeffs: grid_size must be a power of two >= 8K");
    const auto G = static_cast<std::size_t>(grid_size);
    auto buf = fft::make_buffer(G);
    // x_j = −1/2 + j/G. Samples at j and G−j mirror each other, so only half are evaluated.
    std::vector<double> sample(G / 2 + 1);
    for (std::size_t j = 0; j <= G / 2; ++j) sample[j] = phi((0.5 - static_cast<double>(j) / G) / tau);
    for (std::size_t j = 0; j < G; ++j) buf[j] = sample[j <= G / 2 ? j : G - j];
    fft::transform(buf.get(), G, fft::Direction::forward);
    FourierCoeffSet set;
    set.tau = tau;
    set.built_for = built_for;
    set.frequencies.reserve(2 * K + 1);
    set.coeffs.reserve(2 * K + 1);
    std::vector<double> half(K + 1);
    for (int k = 0; k <= K; ++k) {
        // e^{−2πik(−1/2)} = (−1)^k from the half-period shift of the grid.
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        half[k] = sign * buf[k].real() / static_cast<double>(G);
    }
    for (int k = -K; k <= K; ++k) {
        set.frequencies.push_back(k);
        set.coeffs.push_back(half[std::abs(k)]);
    }
    return set;
}

/// Numeric coefficients for a kernel without closed-form ones: the Matérn
/// counterpart, or the smooth part exp(−α‖x‖) + α‖x‖ for the Laplacian.
inline FourierCoeffSet numeric_fourier_coeffs(const KernelSpec& spec, double tau, int K, int grid_size) {
    if (spec.is<Laplacian>()) {
        const double alpha = spec.as<Laplacian>().alpha;
        const int d = spec.d;
        return numeric_fourier_coeffs([&](double s) { return eval_f_laplace_smooth(alpha, d, s); }, tau, K, grid_size, spec);
    }
    if (spec.is<Matern>() || spec.is<Gaussian>())
        return numeric_fourier_coeffs([&](double s) { return eval_f(spec, s); }, tau, K, grid_size, spec);
    throw UnsupportedKernelError("numeric_fourier_coeffs: no smooth 1D counterpart for kernel " + spec.name());
}

/// Text cache format: a header of "key,value" lines, then "k,c_k" pairs.
inline void write_coeffs_csv(std::ostream& os, const FourierCoeffSet& set) {
    os << std::setprecision(17);
    os << "# kernelsum fourier coefficients v1\n";
    os << "family," << set.built_for.name() << "\n";
    os << "params," << set.built_for.params() << "\n";
    os << "d," << set.built_for.d << "\n";
    os << "tau," << set.tau << "\n";
    os << "shift," << set.shift << "\n";
    os << "K," << set.max_frequency() << "\n";
    os << "k,c_k\n";
    for (std::size_t i = 0; i < set.size(); ++i) os << set.frequencies[i] << "," << set.coeffs[i] << "\n";
}

inline FourierCoeffSet read_coeffs_csv(std::istream& is) {
    std::string line;
    std::string family, params;
    int d = 0, K = -1;
    FourierCoeffSet set;
    bool body = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DomainError("read_coeffs_csv: malformed line '" + line + "'");
        const std::string key = line.substr(0, comma);
        const std::string value = line.substr(comma + 1);
        if (body) {
            set.frequencies.push_back(std::stoi(key));
            set.coeffs.push_back(std::stod(value));
        } else if (key == "family") family = value;
        else if (key == "params") params = value;
        else if (key == "d") d = std::stoi(value);
        else if (key == "tau") set.tau = std::stod(value);
        else if (key == "shift") set.shift = std::stod(value);
        else if (key == "K") K = std::stoi(value);
        else if (key == "k") body = true;
        else throw DomainError("read_coeffs_csv: unknown header key '" + key + "'");
    }
    set.built_for = KernelSpec::parse(family, params, d);
    if (set.max_frequency() != K) throw DomainError("read_coeffs_csv: K header does not match the data");
    set.validate();
    return set;
}

inline void save_coeffs(const std::string& path, const FourierCoeffSet& set) {
    std::ofstream os(path);
    if (!os) throw Error("save_coeffs: cannot open " + path);
    write_coeffs_csv(os, set);
}

inline FourierCoeffSet load_coeffs(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("load_coeffs: cannot open " + path);
    return read_coeffs_csv(is);
}

}  // namespace kernelsum
