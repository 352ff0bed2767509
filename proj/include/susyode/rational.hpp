#pragma once

#include <gmpxx.h>

#include <string>

namespace susyode {

/// Exact rational scalar used throughout the symbolic path.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline bool is_zero(const Rational& r) { return sgn(r) == 0; }
inline bool is_negative(const Rational& r) { return sgn(r) < 0; }
inline bool is_one_abs(const Rational& r) { return abs(r) == 1; }

inline double to_double(const Rational& r) { return r.get_d(); }

/// Canonical text: "3", "-4/3".
inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational rat_pow(Rational base, int e) {
    Rational acc(1);
    for (int i = 0; i < e; ++i) acc *= base;
    return acc;
}

inline Rational factorial(int n) {
    Rational acc(1);
    for (int i = 2; i <= n; ++i) acc *= i;
    return acc;
}

/// n(n-1)...(n-k+1); zero when k > n.
inline Rational falling_factorial(int n, int k) {
    Rational acc(1);
    for (int i = 0; i < k; ++i) acc *= (n - i);
    return acc;
}

inline Rational binomial(int n, int k) {
    if (k < 0 || k > n) return Rational(0);
    return falling_factorial(n, k) / factorial(k);
}

} // namespace susyode
