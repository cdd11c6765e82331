#pragma once

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace kernelsum::specfun {

struct SeriesTolerance {
    double rel_tol = 1e-14;
    int max_terms = 10000;

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol < 1.0))
            throw DomainError("SeriesTolerance: rel_tol must lie in (0, 1)");
        if (max_terms < 1) throw DomainError("SeriesTolerance: max_terms must be >= 1");
    }
};

/// ln Γ(x) for x > 0. Uses the reentrant lgamma_r so no global sign flag is
/// written.
inline double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma: x must be positive and finite");
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

/// Γ(a)/Γ(b). Boost's Lanczos-based ratio keeps full relative accuracy for
/// large, close arguments; ratios outside the double range fall back to log space.
inline double gamma_ratio(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("gamma_ratio: arguments must be positive");
    try {
        const double r = boost::math::tgamma_ratio(a, b);
        if (std::isfinite(r) && r > 0.0) return r;
    } catch (const std::exception&) {
    }
    return std::exp(log_gamma(a) - log_gamma(b));
}

namespace detail {

inline bool is_nonpositive_integer(double v) { return v <= 0.0 && v == std::floor(v); }

template <class T>
struct SeriesResult {
    T value{};
    T abs_sum{};
    T max_term{};
    int terms = 0;
    bool converged = false;
};

/// Sums Σ_n t_n with t_0 = 1 and t_{n+1} = t_n · ratio(n). Stops once
/// |t_n| <= rel_tol·|sum| holds for three consecutive terms.
template <class T, class Ratio>
SeriesResult<T> sum_series(Ratio&& ratio, const SeriesTolerance& tol) {
    using std::abs;
    SeriesResult<T> r;
    T sum = 1, comp = 0, term = 1;
    r.abs_sum = 1;
    r.max_term = 1;
    const T rel = tol.rel_tol;
    int small_run = 0;
    for (int n = 0; n < tol.max_terms; ++n) {
        term *= ratio(n);
        const T t = sum + term;
        if (abs(sum) >= abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
        const T a = abs(term);
        r.abs_sum += a;
        if (a > r.max_term) r.max_term = a;
        r.terms = n + 2;
        if (a <= rel * abs(sum + comp)) {
            if (++small_run >= 3) {
                r.converged = true;
                break;
            }
        } else {
            small_run = 0;
        }
    }
    r.value = sum + comp;
    return r;
}

/// Relative rounding error estimate of a series summed in precision eps.
template <class T>
double series_error(const SeriesResult<T>& r, double eps) {
    using std::abs;
    const double mag = static_cast<double>(abs(r.value));
    const double tot = static_cast<double>(r.abs_sum);
    if (mag == 0.0) return std::numeric_limits<double>::infinity();
    return 4.0 * eps * std::sqrt(static_cast<double>(r.terms)) * tot / mag;
}

template <class T>
SeriesResult<T> kummer_series(double a, double b, double x, const SeriesTolerance& tol) {
    const T c = T(b) - T(a);
    const T bb = T(b);
    const T xx = T(x);
    return sum_series<T>([&](int n) { return (c + n) * xx / ((bb + n) * T(n + 1)); }, tol);
}

template <class T>
double hyp1f1_neg_mp(double a, double b, double x, const SeriesTolerance& tol, double budget, bool exact_poly,
                     double& partial) {
    using std::exp;
    auto r = kummer_series<T>(a, b, x, tol);
    const T value = exp(-T(x)) * r.value;
    partial = static_cast<double>(value);
    if (!r.converged) throw ConvergenceError("hyp1f1_neg: series did not converge within max_terms", partial);
    const double eps = static_cast<double>(std::numeric_limits<T>::epsilon());
    if (exact_poly || series_error(r, eps) <= budget) return partial;
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

/// ₁F₁(a; b; −x) for a, b > 0 and x >= 0.
///
/// Always evaluated through Kummer's transformation e^{−x}·₁F₁(b−a; b; x).
/// The series is first summed in double precision with a running cancellation
/// estimate; when that estimate exceeds the accuracy budget the same series is
/// re-summed with 50, 100 or 200 decimal digits.
inline double hyp1f1_neg(double a, double b, double x, const SeriesTolerance& tol = {}) {
    tol.validate();
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("hyp1f1_neg: a must be positive");
    if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("hyp1f1_neg: b must be positive");
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("hyp1f1_neg: x must be non-negative");
    if (x == 0.0) return 1.0;
    if (a == b) return std::exp(-x);

    constexpr double kBudget = 1e-12;
    const bool exact_poly = detail::is_nonpositive_integer(b - a);
    double loss = std::numeric_limits<double>::infinity();
    double partial = 0.0;
    if (x < 600.0) {
        auto r = detail::kummer_series<double>(a, b, x, tol);
        partial = std::exp(-x) * r.value;
        if (!r.converged) throw ConvergenceError("hyp1f1_neg: series did not converge within max_terms", partial);
        const double err = detail::series_error(r, std::numeric_limits<double>::epsilon());
        if (err <= kBudget) return partial;
        if (r.value != 0.0) loss = r.abs_sum / std::abs(r.value);
    }

    namespace mp = boost::multiprecision;
    using Float200 = mp::number<mp::cpp_bin_float<200>>;
    const double digits_needed = std::isfinite(loss) ? std::log10(loss) + 20.0 : 1e9;
    double v = std::numeric_limits<double>::quiet_NaN();
    if (digits_needed <= 50.0)
        v = detail::hyp1f1_neg_mp<mp::cpp_bin_float_50>(a, b, x, tol, kBudget, exact_poly, partial);
    if (std::isnan(v) && digits_needed <= 100.0)
        v = detail::hyp1f1_neg_mp<mp::cpp_bin_float_100>(a, b, x, tol, kBudget, exact_poly, partial);
    if (std::isnan(v)) v = detail::hyp1f1_neg_mp<Float200>(a, b, x, tol, kBudget, exact_poly, partial);
    if (std::isnan(v))
        throw ConvergenceError("hyp1f1_neg: cancellation exceeds 200-digit working precision", partial);
    return v;
}

/// ₁F₂(a; b, c; x) from its defining series with compensated summation.
/// Throws ConvergenceError when the largest term exceeds 1e15·|result|,
/// i.e. when internal cancellation would leave fewer than one correct digit.
inline double hyp1f2(double a, double b, double c, double x, const SeriesTolerance& tol = {}) {
    tol.validate();
    if (detail::is_nonpositive_integer(b) || detail::is_nonpositive_integer(c))
        throw DomainError("hyp1f2: b and c must not be non-positive integers");
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("hyp1f2: x must be non-negative");
    if (x == 0.0) return 1.0;
    auto r = detail::sum_series<double>([&](int n) { return (a + n) * x / ((b + n) * (c + n) * (n + 1.0)); }, tol);
    if (!r.converged) throw ConvergenceError("hyp1f2: series did not converge within max_terms", r.value);
    if (r.max_term > 1e15 * std::abs(r.value))
        throw ConvergenceError("hyp1f2: cancellation too severe for double precision", r.value);
    return r.value;
}

/// Harmonic number H_x = ∫₀¹ (1 − t^x)/(1 − t) dt for x >= 0.
inline double harmonic(double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("harmonic: x must be non-negative");
    if (x == std::floor(x) && x < 1e6) {
        double h = 0.0;
        for (long k = static_cast<long>(x); k >= 1; --k) h += 1.0 / static_cast<double>(k);
        return h;
    }
    const double twice = 2.0 * x;
    if (twice == std::floor(twice) && x < 1e6) {
        double h = 0.0;
        for (double k = x; k > 0.75; k -= 1.0) h += 1.0 / k;
        return h + (2.0 - 2.0 * std::numbers::ln2);
    }
    return boost::math::digamma(x + 1.0) + std::numbers::egamma;
}

/// Matérn basis function for ν = p + 1/2 through its closed form
/// exp(−√(2p+1)x/β)·(p!/(2p)!)·Σ_n (p+n)!/(n!(p−n)!)·(2√(2p+1)x/β)^{p−n}.
inline double matern_halfint_F(int p, double beta, double x) {
    if (p < 0) throw DomainError("matern_halfint_F: p must be non-negative");
    if (!(beta > 0.0)) throw DomainError("matern_halfint_F: beta must be positive");
    if (!(x >= 0.0)) throw DomainError("matern_halfint_F: x must be non-negative");
    if (x == 0.0) return 1.0;
    const double y = 2.0 * std::sqrt(2.0 * p + 1.0) * x / beta;
    if (p == 0) return std::exp(-0.5 * y);
    const double log_y = std::log(y);
    const double log_front = log_gamma(p + 1.0) - log_gamma(2.0 * p + 1.0);
    double sum = 0.0;
    for (int n = p; n >= 0; --n) {
        const double log_c = log_front + log_gamma(p + n + 1.0) - log_gamma(n + 1.0) - log_gamma(p - n + 1.0);
        if (n == p)
            sum += std::exp(log_c - 0.5 * y);
        else if (y > 0.0)
            sum += std::exp(log_c + (p - n) * log_y - 0.5 * y);
    }
    return sum;
}

}  // namespace kernelsum::specfun
