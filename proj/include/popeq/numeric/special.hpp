#pragma once

// Special functions and distribution functions used by every test family:
// standard normal CDF and quantile, the regularized incomplete beta
// function, Student t CDF and binomial probabilities.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "popeq/error.hpp"

namespace popeq {

namespace detail {

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw DomainError(std::string(what) + ": non-finite argument");
    }
}

// std::lgamma writes the global signgam on glibc; lgamma_r does not.
inline double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

// Remainder of Stirling's series: lgamma(z) - [(z - 1/2) log z - z + log(2 pi)/2].
inline double stirling_remainder(double z) {
    constexpr double half_log_two_pi = 0.91893853320467274178;
    if (z < 12.0) {
        return log_gamma(z) - ((z - 0.5) * std::log(z) - z + half_log_two_pi);
    }
    const double r = 1.0 / z;
    const double r2 = r * r;
    return r * (1.0 / 12.0 -
                r2 * (1.0 / 360.0 -
                      r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 * (1.0 / 1188.0)))));
}

// log of x^a (1-x)^b / B(a, b), with y = 1 - x supplied by the caller so that
// neither tail loses precision. Stirling's form keeps large a, b accurate.
inline double log_beta_power_terms(double a, double b, double x, double y) {
    constexpr double half_log_two_pi = 0.91893853320467274178;
    const double c = a + b;
    // a log(x c / a) + b log(y c / b), each via log1p of a small offset.
    const double dx = (x * b - y * a) / a;  // x c / a - 1
    const double dy = (y * a - x * b) / b;  // y c / b - 1
    const double ta = std::abs(dx) < 0.5 ? a * std::log1p(dx) : a * std::log(x * c / a);
    const double tb = std::abs(dy) < 0.5 ? b * std::log1p(dy) : b * std::log(y * c / b);
    return ta + tb + 0.5 * (std::log(a) + std::log(b) - std::log(c)) - half_log_two_pi +
           stirling_remainder(c) - stirling_remainder(a) - stirling_remainder(b);
}

inline constexpr int ibeta_max_iterations = 300;
inline constexpr double ibeta_tolerance = 1e-14;

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
inline double ibeta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= ibeta_max_iterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < ibeta_tolerance) return h;
    }
    throw NumericError("regularized_incomplete_beta: continued fraction did not converge (a=" +
                       std::to_string(a) + ", b=" + std::to_string(b) +
                       ", x=" + std::to_string(x) + ")");
}

}  // namespace detail

/// Standard normal CDF, evaluated through the complementary error function
/// (accurate to a few ulps across the real line, including both tails).
inline double std_normal_cdf(double x) {
    detail::require_finite(x, "std_normal_cdf");
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Upper tail 1 - Phi(x) without cancellation for large positive x.
inline double std_normal_sf(double x) {
    detail::require_finite(x, "std_normal_sf");
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

/// Standard normal quantile, Wichura's AS241 (PPND16) rational
/// approximations, relative accuracy around 1e-16.
inline double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("std_normal_quantile: p must lie in (0,1)");
    }
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r +
                     67265.770927008700853) * r + 45921.953931549871457) * r +
                   13731.693765509461125) * r + 1971.5909503065514427) * r +
                 133.14166789178437745) * r + 3.387132872796366608) /
               (((((((r * 5226.495278852545925 + 28729.085735721942674) * r +
                     39307.89580009271061) * r + 21213.794301586595867) * r +
                   5394.1960214247511077) * r + 687.1870074920579083) * r +
                 42.313330701600911252) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r +
                    0.24178072517745061177) * r + 1.27045825245236838258) * r +
                  3.64784832476320460504) * r + 5.7694972214606914055) * r +
                4.6303378461565452959) * r + 1.42343711074968357734) /
              (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r +
                    0.0151986665636164571966) * r + 0.14810397642748007459) * r +
                  0.68976733498510000455) * r + 1.6763848301838038494) * r +
                2.05319162663775882187) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r +
                    0.0012426609473880784386) * r + 0.026532189526576123093) * r +
                  0.29656057182850489123) * r + 1.7848265399172913358) * r +
                5.4637849111641143699) * r + 6.6579046435011037772) /
              (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r +
                    1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
                  0.0148753612908506148525) * r + 0.13692988092273580531) * r +
                0.59983220655588793769) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

/// Regularized incomplete beta I_x(a, b) with y = 1 - x passed explicitly,
/// so callers that know the complement exactly keep full precision.
inline double regularized_incomplete_beta(double a, double b, double x, double y) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("regularized_incomplete_beta: a and b must be positive");
    }
    if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0)) {
        throw DomainError("regularized_incomplete_beta: x must lie in [0,1]");
    }
    if (x == 0.0) return 0.0;
    if (y == 0.0) return 1.0;
    const double log_front = detail::log_beta_power_terms(a, b, x, y);
    if (x <= a / (a + b)) {
        return std::exp(log_front) * detail::ibeta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - std::exp(log_front) * detail::ibeta_continued_fraction(b, a, y) / b;
}

inline double regularized_incomplete_beta(double a, double b, double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("regularized_incomplete_beta: x must lie in [0,1]");
    }
    return regularized_incomplete_beta(a, b, x, 1.0 - x);
}

/// Upper tail 1 - I_x(a, b) computed without subtracting from one.
inline double regularized_incomplete_beta_complement(double a, double b, double x, double y) {
    return regularized_incomplete_beta(b, a, y, x);
}

/// log Beta(a, b) density at x (y = 1 - x).
inline double beta_log_density(double a, double b, double x, double y) {
    return detail::log_beta_power_terms(a, b, x, y) - std::log(x) - std::log(y);
}

/// CDF of Student's t with df degrees of freedom.
inline double student_t_cdf(double t, double df) {
    if (!(df > 0.0) || std::isnan(df)) {
        throw DomainError("student_t_cdf: df must be positive");
    }
    if (std::isnan(t)) throw DomainError("student_t_cdf: NaN argument");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    if (t == 0.0) return 0.5;
    if (std::isinf(df)) return std_normal_cdf(t);
    const double t2 = t * t;
    // Pr(T > |t|) = I_{df/(df+t^2)}(df/2, 1/2) / 2; both arguments formed directly.
    const double x = df / (df + t2);
    const double y = t2 / (df + t2);
    const double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x, y);
    return t > 0 ? 1.0 - tail : tail;
}

/// Upper tail Pr(T > t) of Student's t.
inline double student_t_sf(double t, double df) {
    if (std::isnan(t)) throw DomainError("student_t_sf: NaN argument");
    return student_t_cdf(-t, df);
}

/// log of the binomial coefficient C(n, k).
inline double log_binomial_coefficient(std::int64_t n, std::int64_t k) {
    return detail::log_gamma(static_cast<double>(n) + 1.0) -
           detail::log_gamma(static_cast<double>(k) + 1.0) -
           detail::log_gamma(static_cast<double>(n - k) + 1.0);
}

namespace detail {

// log(n!) - log(sqrt(2 pi n) (n/e)^n).
inline double stirling_error(double n) {
    constexpr double s0 = 1.0 / 12.0;
    constexpr double s1 = 1.0 / 360.0;
    constexpr double s2 = 1.0 / 1260.0;
    constexpr double s3 = 1.0 / 1680.0;
    constexpr double s4 = 1.0 / 1188.0;
    if (n <= 15.0) {
        return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    const double nn = n * n;
    if (n > 500.0) return (s0 - s1 / nn) / n;
    if (n > 80.0) return (s0 - (s1 - s2 / nn) / nn) / n;
    if (n > 35.0) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x log(x / m) + m - x, accurate when x is close to m.
inline double deviance_term(double x, double m) {
    if (std::abs(x - m) < 0.1 * (x + m)) {
        double v = (x - m) / (x + m);
        double s = (x - m) * v;
        double ej = 2.0 * x * v;
        v *= v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v;
            const double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
    }
    return x * std::log(x / m) + m - x;
}

}  // namespace detail

/// Binomial probability mass by the saddle-point expansion, which keeps
/// full relative precision for large n.
inline double binomial_pmf(std::int64_t y, std::int64_t n, double p) {
    if (n < 0 || y < 0 || y > n) {
        throw DomainError("binomial_pmf: require 0 <= y <= n");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("binomial_pmf: p must lie in [0,1]");
    }
    if (p == 0.0) return y == 0 ? 1.0 : 0.0;
    if (p == 1.0) return y == n ? 1.0 : 0.0;
    const double q = 1.0 - p;
    const double nd = static_cast<double>(n);
    if (y == 0) return std::exp(nd * std::log1p(-p));
    if (y == n) return std::exp(nd * std::log(p));
    const double x = static_cast<double>(y);
    const double lc = detail::stirling_error(nd) - detail::stirling_error(x) - detail::stirling_error(nd - x) -
                      detail::deviance_term(x, nd * p) - detail::deviance_term(nd - x, nd * q);
    return std::exp(lc) * std::sqrt(nd / (2.0 * std::numbers::pi * x * (nd - x)));
}

/// Pr(Y >= y) for Y ~ Binomial(n, p).
inline double binomial_upper_tail(std::int64_t y, std::int64_t n, double p) {
    if (n < 0 || y < 0 || y > n) {
        throw DomainError("binomial_upper_tail: require 0 <= y <= n");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("binomial_upper_tail: p must lie in [0,1]");
    }
    if (y == 0) return 1.0;
    long double sum = 0.0L;
    for (std::int64_t k = n; k >= y; --k) sum += binomial_pmf(k, n, p);
    return std::min(1.0, static_cast<double>(sum));
}

/// Pr(Y <= y) for Y ~ Binomial(n, p).
inline double binomial_lower_tail(std::int64_t y, std::int64_t n, double p) {
    if (n < 0 || y < 0 || y > n) {
        throw DomainError("binomial_lower_tail: require 0 <= y <= n");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("binomial_lower_tail: p must lie in [0,1]");
    }
    if (y == n) return 1.0;
    long double sum = 0.0L;
    for (std::int64_t k = 0; k <= y; ++k) sum += binomial_pmf(k, n, p);
    return std::min(1.0, static_cast<double>(sum));
}

}  // namespace popeq
