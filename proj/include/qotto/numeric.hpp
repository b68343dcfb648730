// numeric.hpp: overflow-safe log-domain helpers.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace qotto::numeric {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// log(sum_i exp(args[i])), safe against overflow. Empty input -> -inf.
inline double log_sum_exp(std::span<const double> args) {
    double m = neg_inf;
    for (double a : args) m = std::max(m, a);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double a : args) s += std::exp(a - m);
    return m + std::log(s);
}

// log(2*cosh(z)) without overflow.
inline double log_2cosh(double z) {
    const double a = std::abs(z);
    return a + std::log1p(std::exp(-2.0 * a));
}

// log(exp(a) + exp(b)).
inline double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (!std::isfinite(a)) return a;
    return a + std::log1p(std::exp(b - a));
}

// Value carried as sign * exp(log_abs); zero encoded as sign == 0.
struct SignedLog {
    int sign{0};
    double log_abs{neg_inf};
};

// 1 - exp(t) in signed log form.
inline SignedLog log_one_minus_exp(double t) {
    if (t == 0.0) return {0, neg_inf};
    if (t < 0.0) return {1, std::log1p(-std::exp(t))};
    // 1 - e^t = -(e^t - 1)
    if (t < 1e-8) return {-1, std::log(std::expm1(t))};
    return {-1, t + std::log1p(-std::exp(-t))};
}

inline SignedLog signed_mul(const SignedLog& a, const SignedLog& b) {
    if (a.sign == 0 || b.sign == 0) return {0, neg_inf};
    return {a.sign * b.sign, a.log_abs + b.log_abs};
}

inline SignedLog signed_add(const SignedLog& a, const SignedLog& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    if (a.sign == b.sign) return {a.sign, log_add_exp(a.log_abs, b.log_abs)};
    if (a.log_abs == b.log_abs) return {0, neg_inf};
    const SignedLog& big = (a.log_abs > b.log_abs) ? a : b;
    const SignedLog& small = (a.log_abs > b.log_abs) ? b : a;
    return {big.sign, big.log_abs + std::log1p(-std::exp(small.log_abs - big.log_abs))};
}

}  // namespace qotto::numeric
