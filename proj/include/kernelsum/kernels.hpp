#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "specfun.hpp"

namespace kernelsum {

struct Gaussian {
    double sigma = 1.0;
};
struct Laplacian {
    double alpha = 1.0;
};
/// Matérn kernel with smoothness ν = p + 1/2 and length scale β.
struct Matern {
    int p = 1;
    double beta = 1.0;
};
struct NegativeDistance {};
struct Riesz {
    double r = 1.0;
};
struct ThinPlate {};

using KernelFamily = std::variant<Gaussian, Laplacian, Matern, NegativeDistance, Riesz, ThinPlate>;

/// A radial kernel K(x, y) = F(‖x − y‖) on R^d.
struct KernelSpec {
    KernelFamily family;
    int d = 1;

    static KernelSpec gaussian(double sigma, int d) { return make(Gaussian{sigma}, d); }
    static KernelSpec laplacian(double alpha, int d) { return make(Laplacian{alpha}, d); }
    static KernelSpec matern(int p, double beta, int d) { return make(Matern{p, beta}, d); }
    static KernelSpec negative_distance(int d) { return make(NegativeDistance{}, d); }
    static KernelSpec riesz(double r, int d) { return make(Riesz{r}, d); }
    static KernelSpec thin_plate(int d) { return make(ThinPlate{}, d); }

    static KernelSpec make(KernelFamily fam, int d) {
        KernelSpec s{fam, d};
        s.validate();
        return s;
    }

    void validate() const {
        if (d < 1) throw DomainError("KernelSpec: dimension must be >= 1");
        std::visit(
            [](const auto& k) {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Gaussian>) {
                    if (!(k.sigma > 0.0 && std::isfinite(k.sigma))) throw DomainError("Gaussian: sigma must be positive");
                } else if constexpr (std::is_same_v<K, Laplacian>) {
                    if (!(k.alpha > 0.0 && std::isfinite(k.alpha))) throw DomainError("Laplacian: alpha must be positive");
                } else if constexpr (std::is_same_v<K, Matern>) {
                    if (k.p < 0) throw DomainError("Matern: p must be non-negative");
                    if (!(k.beta > 0.0 && std::isfinite(k.beta))) throw DomainError("Matern: beta must be positive");
                } else if constexpr (std::is_same_v<K, Riesz>) {
                    if (!(k.r > 0.0 && k.r < 2.0)) throw DomainError("Riesz: r must lie in (0, 2)");
                }
            },
            family);
    }

    template <class K>
    bool is() const {
        return std::holds_alternative<K>(family);
    }

    template <class K>
    const K& as() const {
        return std::get<K>(family);
    }

    std::string name() const {
        return std::visit(
            [](const auto& k) -> std::string {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Gaussian>) return "gaussian";
                else if constexpr (std::is_same_v<K, Laplacian>) return "laplacian";
                else if constexpr (std::is_same_v<K, Matern>) return "matern";
                else if constexpr (std::is_same_v<K, NegativeDistance>) return "negdist";
                else if constexpr (std::is_same_v<K, Riesz>) return "riesz";
                else return "thinplate";
            },
            family);
    }

    /// Family parameters as "key=value" pairs joined by ';' (17 significant digits).
    std::string params() const {
        std::ostringstream os;
        os.precision(17);
        std::visit(
            [&](const auto& k) {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Gaussian>) os << "sigma=" << k.sigma;
                else if constexpr (std::is_same_v<K, Laplacian>) os << "alpha=" << k.alpha;
                else if constexpr (std::is_same_v<K, Matern>) os << "p=" << k.p << ";beta=" << k.beta;
                else if constexpr (std::is_same_v<K, Riesz>) os << "r=" << k.r;
            },
            family);
        return os.str();
    }

    /// Inverse of name()/params().
    static KernelSpec parse(const std::string& name, const std::string& params, int d) {
        std::map<std::string, double> kv;
        std::stringstream ss(params);
        std::string item;
        while (std::getline(ss, item, ';')) {
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw DomainError("KernelSpec::parse: malformed parameter '" + item + "'");
            kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        }
        auto get = [&](const char* key) {
            auto it = kv.find(key);
            if (it == kv.end()) throw DomainError(std::string("KernelSpec::parse: missing parameter ") + key);
            return it->second;
        };
        if (name == "gaussian") return gaussian(get("sigma"), d);
        if (name == "laplacian") return laplacian(get("alpha"), d);
        if (name == "matern") return matern(static_cast<int>(get("p")), get("beta"), d);
        if (name == "negdist") return negative_distance(d);
        if (name == "riesz") return riesz(get("r"), d);
        if (name == "thinplate") return thin_plate(d);
        throw DomainError("KernelSpec::parse: unknown kernel family '" + name + "'");
    }

    friend bool operator==(const KernelSpec& a, const KernelSpec& b) {
        return a.d == b.d && a.name() == b.name() && a.params() == b.params();
    }
};

/// c_d = √π·Γ((d+1)/2)/Γ(d/2), the slope of the 1D counterpart of −‖x − y‖.
inline double negdist_constant(int d) {
    if (d < 1) throw DomainError("negdist_constant: d must be >= 1");
    return std::sqrt(std::numbers::pi) * specfun::gamma_ratio((d + 1) / 2.0, d / 2.0);
}

/// Constant C in the thin-plate counterpart f(x) = d·x²ln x − C·x².
inline double thin_plate_C(int d) {
    if (d < 1) throw DomainError("thin_plate_C: d must be >= 1");
    return -0.5 * d * (specfun::harmonic(d / 2.0) - 2.0 + 2.0 * std::numbers::ln2);
}

namespace detail {

/// 1D counterpart of the Gaussian: ₁F₁(a; 1/2; −z) with a = d/2, z = s²/(2σ²),
/// accurate to about 1e-13 in absolute terms.
class GaussianProfile {
public:
    static double eval(int d, double z) {
        if (d == 1) return std::exp(-z);
        const double a = 0.5 * d;
        if (z < 600.0) {
            specfun::SeriesTolerance tol{1e-17, 100000};
            auto r = specfun::detail::kummer_series<double>(a, 0.5, z, tol);
            const double scale = std::exp(-z);
            const double err = 4.0 * std::numeric_limits<double>::epsilon() *
                               std::sqrt(static_cast<double>(r.terms)) * r.abs_sum * scale;
            if (err <= 1e-13) return scale * r.value;
        }
        if (d >= 8) return spectral(a, std::sqrt(z));
        return asymptotic(a, z);
    }

    /// (2/Γ(a))∫₀^∞ e^{−u²}u^{2a−1}cos(2ut) du by the trapezoid rule on a window
    /// around the peak u* = √(a − 1/2). The integrand is analytic apart from the
    /// u^{2a−1} factor at the origin, whose endpoint error is O(h^{2a}).
    static double spectral(double a, double t) {
        const double peak = std::sqrt(a - 0.5);
        const double h = std::min(0.05, std::numbers::pi / (t + 15.0));
        const double lo = std::max(0.0, peak - 10.0);
        const double hi = peak + 10.0;
        const long j0 = static_cast<long>(std::ceil(lo / h));
        const long j1 = static_cast<long>(std::floor(hi / h));
        const double log_front = std::log(2.0 * h) - specfun::log_gamma(a);
        double sum = 0.0;
        for (long j = std::max(1L, j0); j <= j1; ++j) {
            const double u = j * h;
            sum += std::exp(log_front - u * u + (2.0 * a - 1.0) * std::log(u)) * std::cos(2.0 * u * t);
        }
        return sum;
    }

    /// Large-z expansion Γ(1/2)/Γ(1/2 − a)·z^{−a}·Σ_n (a)_n (a + 1/2)_n/n!·z^{−n}
    /// (the exponentially small companion term is below double resolution here).
    static double asymptotic(double a, double z) {
        const double b = 0.5;
        const double g = std::tgamma(b - a);
        if (!std::isfinite(g) || g == 0.0) return 0.0;
        double term = 1.0, sum = 1.0;
        for (int n = 0; n < 40; ++n) {
            term *= (a + n) * (a - b + 1.0 + n) / ((n + 1.0) * z);
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        return std::sqrt(std::numbers::pi) / g * std::pow(z, -a) * sum;
    }
};

/// Evaluates A·₁F₂(a1; b1, c1; z) − B·₁F₂(a2; b2, c2; z) in precision T.
template <class T>
struct Hyp1f2Pair {
    T value;
    double err;
};

template <class T>
Hyp1f2Pair<T> hyp1f2_pair(double a1, double b1, double c1, double A, double a2, double b2, double c2, double B, double z) {
    specfun::SeriesTolerance tol{1e-40, 100000};
    using std::abs;
    const T zz = T(z);
    auto s1 = specfun::detail::sum_series<T>(
        [&](int n) { return (T(a1) + n) * zz / ((T(b1) + n) * (T(c1) + n) * T(n + 1)); }, tol);
    auto s2 = specfun::detail::sum_series<T>(
        [&](int n) { return (T(a2) + n) * zz / ((T(b2) + n) * (T(c2) + n) * T(n + 1)); }, tol);
    if (!s1.converged || !s2.converged)
        throw ConvergenceError("hyp1f2 pair: series did not converge", static_cast<double>(T(A) * s1.value - T(B) * s2.value));
    const T v = T(A) * s1.value - T(B) * s2.value;
    const double eps = static_cast<double>(std::numeric_limits<T>::epsilon());
    const double mass = std::abs(A) * static_cast<double>(s1.abs_sum) * std::sqrt(double(s1.terms)) +
                        std::abs(B) * static_cast<double>(s2.abs_sum) * std::sqrt(double(s2.terms));
    return {v, 4.0 * eps * mass};
}

/// Absolute accuracy target for ₁F₂-based counterparts.
inline constexpr double kPairBudget = 1e-11;

inline double hyp1f2_pair_robust(double a1, double b1, double c1, double A, double a2, double b2, double c2, double B,
                                 double z) {
    namespace mp = boost::multiprecision;
    {
        auto r = hyp1f2_pair<double>(a1, b1, c1, A, a2, b2, c2, B, z);
        if (r.err <= kPairBudget) return r.value;
    }
    {
        auto r = hyp1f2_pair<long double>(a1, b1, c1, A, a2, b2, c2, B, z);
        if (r.err <= kPairBudget) return static_cast<double>(r.value);
    }
    {
        auto r = hyp1f2_pair<mp::cpp_bin_float_50>(a1, b1, c1, A, a2, b2, c2, B, z);
        if (r.err <= kPairBudget) return static_cast<double>(r.value);
    }
    auto r = hyp1f2_pair<mp::cpp_bin_float_100>(a1, b1, c1, A, a2, b2, c2, B, z);
    if (r.err <= kPairBudget) return static_cast<double>(r.value);
    throw ConvergenceError("hyp1f2 pair: cancellation between the two terms is too severe", static_cast<double>(r.value));
}

inline double laplacian_profile(double alpha, int d, double s) {
    if (d == 1) return std::exp(-alpha * s);
    const double z = 0.25 * alpha * alpha * s * s;
    const double slope = alpha * negdist_constant(d) * s;
    return hyp1f2_pair_robust(0.5 * d, 0.5, 0.5, 1.0, 0.5 * (d + 1), 1.0, 1.5, slope, z);
}

inline double matern_profile(int p, double beta, int d, double s) {
    const double nu = p + 0.5;
    if (p == 0) return laplacian_profile(1.0 / beta, d, s);
    const double z = nu * s * s / (2.0 * beta * beta);
    // Γ(1 − ν) = (−1)^p·π/Γ(ν) by reflection, since sin(πν) = (−1)^p.
    const double sign = (p % 2 == 0) ? 1.0 : -1.0;
    const double log_abs = std::log(std::numbers::pi) - specfun::log_gamma(nu) + specfun::log_gamma(nu + 0.5 * d) +
                           nu * std::log(2.0 * nu) - specfun::log_gamma(0.5 * d) - specfun::log_gamma(2.0 * nu + 1.0) -
                           2.0 * nu * std::log(beta);
    const double B = s > 0.0 ? sign * std::exp(log_abs + 2.0 * nu * std::log(s)) : 0.0;
    return hyp1f2_pair_robust(0.5 * d, 0.5, 1.0 - nu, 1.0, nu + 0.5 * d, nu + 0.5, nu + 1.0, B, z);
}

}  // namespace detail

/// Basis function F(s) of the d-dimensional kernel.
inline double eval_F(const KernelSpec& spec, double s) {
    if (!(s >= 0.0)) throw DomainError("eval_F: s must be non-negative");
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Gaussian>) return std::exp(-s * s / (2.0 * k.sigma * k.sigma));
            else if constexpr (std::is_same_v<K, Laplacian>) return std::exp(-k.alpha * s);
            else if constexpr (std::is_same_v<K, Matern>) return specfun::matern_halfint_F(k.p, k.beta, s);
            else if constexpr (std::is_same_v<K, NegativeDistance>) return -s;
            else if constexpr (std::is_same_v<K, Riesz>) return -std::pow(s, k.r);
            else return s > 0.0 ? s * s * std::log(s) : 0.0;
        },
        spec.family);
}

/// Derivative F'(s).
inline double eval_dF(const KernelSpec& spec, double s) {
    if (!(s >= 0.0)) throw DomainError("eval_dF: s must be non-negative");
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Gaussian>) {
                const double v = k.sigma * k.sigma;
                return -s / v * std::exp(-s * s / (2.0 * v));
            } else if constexpr (std::is_same_v<K, Laplacian>) {
                return -k.alpha * std::exp(-k.alpha * s);
            } else if constexpr (std::is_same_v<K, Matern>) {
                if (k.p == 0) return -std::exp(-s / k.beta) / k.beta;
                const double nu = k.p + 0.5;
                const double beta_lower = k.beta * std::sqrt((2.0 * k.p - 1.0) / (2.0 * k.p + 1.0));
                return -nu * s / (k.beta * k.beta * (nu - 1.0)) * specfun::matern_halfint_F(k.p - 1, beta_lower, s);
            } else if constexpr (std::is_same_v<K, NegativeDistance>) {
                return -1.0;
            } else if constexpr (std::is_same_v<K, Riesz>) {
                return -k.r * std::pow(s, k.r - 1.0);
            } else {
                return s > 0.0 ? 2.0 * s * std::log(s) + s : 0.0;
            }
        },
        spec.family);
}

/// One-dimensional counterpart f(s), so that F(‖x‖) = E_ξ f(|⟨ξ, x⟩|) for ξ
/// uniform on the sphere S^{d−1}.
inline double eval_f(const KernelSpec& spec, double s) {
    if (!(s >= 0.0)) throw DomainError("eval_f: s must be non-negative");
    const int d = spec.d;
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Gaussian>) {
                const double z = s * s / (2.0 * k.sigma * k.sigma);
                return detail::GaussianProfile::eval(d, z);
            } else if constexpr (std::is_same_v<K, Laplacian>) {
                return detail::laplacian_profile(k.alpha, d, s);
            } else if constexpr (std::is_same_v<K, Matern>) {
                return detail::matern_profile(k.p, k.beta, d, s);
            } else if constexpr (std::is_same_v<K, NegativeDistance>) {
                return -negdist_constant(d) * s;
            } else if constexpr (std::is_same_v<K, Riesz>) {
                const double c = std::exp(0.5 * std::log(std::numbers::pi) + specfun::log_gamma(0.5 * (d + k.r)) -
                                          specfun::log_gamma(0.5 * d) - specfun::log_gamma(0.5 * (k.r + 1.0)));
                return -c * std::pow(s, k.r);
            } else {
                if (s == 0.0) return 0.0;
                return d * s * s * std::log(s) - thin_plate_C(d) * s * s;
            }
        },
        spec.family);
}

/// Counterpart of the smooth Laplacian part exp(−α‖x‖) + α‖x‖, i.e. the
/// Laplacian counterpart plus α·c_d·s.
inline double eval_f_laplace_smooth(double alpha, int d, double s) {
    return detail::laplacian_profile(alpha, d, s) + alpha * negdist_constant(d) * s;
}

struct PowerSeries {
    std::vector<double> coefficients;
    bool global_radius = true;

    double operator()(double x) const {
        double acc = 0.0;
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
};

/// Maps the Taylor coefficients a_n of F to those of its counterpart f:
/// b_n = √π·Γ((n+d)/2)/(Γ(d/2)·Γ((n+1)/2))·a_n.
inline PowerSeries series_transform(const PowerSeries& a, int d) {
    if (d < 1) throw DomainError("series_transform: d must be >= 1");
    PowerSeries b;
    b.coefficients.resize(a.coefficients.size());
    // √π/Γ(d/2) = 1/(Γ(d/2)/Γ(1/2)), kept as a ratio so it cannot overflow.
    const double denom = specfun::gamma_ratio(0.5 * d, 0.5);
    for (std::size_t n = 0; n < a.coefficients.size(); ++n)
        b.coefficients[n] = specfun::gamma_ratio(0.5 * (n + d), 0.5 * (n + 1.0)) / denom * a.coefficients[n];
    return b;
}

/// Quadrature value of S_d(f)(s) = [2Γ(d/2)/(√π Γ((d−1)/2))]∫₀¹ f(ts)(1−t²)^{(d−3)/2} dt.
/// Integrated in θ with t = sin θ, which turns the weight into cos^{d−2}θ.
template <class Fn>
double slice_transform_numeric(Fn&& f, int d, double s) {
    if (d < 2) throw DomainError("slice_transform_numeric: d must be >= 2");
    if (!(s >= 0.0)) throw DomainError("slice_transform_numeric: s must be non-negative");
    const double norm = 2.0 * std::exp(specfun::log_gamma(0.5 * d) - specfun::log_gamma(0.5 * (d - 1))) /
                        std::sqrt(std::numbers::pi);
    boost::math::quadrature::tanh_sinh<double> integrator(15);
    auto integrand = [&](double theta) {
        const double c = std::cos(theta);
        return f(s * std::sin(theta)) * (d == 2 ? 1.0 : std::pow(c, d - 2));
    };
    double err = 0.0, l1 = 0.0;
    const double value = integrator.integrate(integrand, 0.0, std::numbers::pi / 2, 1e-13, &err, &l1);
    if (!(err <= 1e-10 * std::max(1.0, l1)))
        throw ConvergenceError("slice_transform_numeric: quadrature did not reach tolerance", norm * value);
    return norm * value;
}

/// F(s) + s·F'(s), the three-dimensional counterpart of F.
template <class Fn, class DFn>
double d3_counterpart(Fn&& F, DFn&& dF, double s) {
    return F(s) + s * dF(s);
}

/// Radius L(d) beyond which the unit-width Gaussian counterpart stays below
/// delta in magnitude: |f_1(s)| <= delta for s >= L. Scales linearly with σ.
inline double gaussian_decay_radius(int d, double delta = 1e-10) {
    if (d < 1) throw DomainError("gaussian_decay_radius: d must be >= 1");
    static std::mutex cache_mutex;
    static std::map<std::pair<int, double>, double> cache;
    {
        std::lock_guard lock(cache_mutex);
        if (auto it = cache.find({d, delta}); it != cache.end()) return it->second;
    }
    const double a = 0.5 * d;
    const double step = 0.05;
    const double s_max = 80.0;
    double last = 0.0;
    for (double s = step; s <= s_max; s += step)
        if (std::abs(detail::GaussianProfile::eval(d, 0.5 * s * s)) > delta) last = s;
    double L = last + step;
    if (d % 2 == 0) {
        // Algebraic tail Γ(1/2)/|Γ(1/2 − a)|·z^{−a}; only meaningful once z ≫ a².
        const double log_c = -0.5 * std::log(std::numbers::pi) + specfun::log_gamma(a + 0.5);
        const double z_tail = std::exp((log_c - std::log(delta)) / a);
        if (z_tail >= 4.0 * a * a) L = std::max(L, std::sqrt(2.0 * z_tail));
    }
    std::lock_guard lock(cache_mutex);
    cache[{d, delta}] = L;
    return L;
}

}  // namespace kernelsum
