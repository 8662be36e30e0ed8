#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

#include <gmpxx.h>

namespace latboot {

using BigInt = mpz_class;
using Rational = mpq_class;

/// The two arithmetic modes. Exact rationals back every verification path;
/// doubles back Monte Carlo and large sweeps. A computation never mixes them.
template <class S>
concept Scalar = std::same_as<S, Rational> || std::same_as<S, double>;

template <Scalar S>
inline constexpr bool is_exact_v = std::same_as<S, Rational>;

/// num/den in the requested mode. den must be nonzero.
template <Scalar S>
S make_ratio(const BigInt& num, const BigInt& den) {
  if constexpr (is_exact_v<S>) {
    Rational q(num, den);
    q.canonicalize();
    return q;
  } else {
    // mpz get_d truncates beyond 2^1024; callers needing that range use the
    // log-domain helpers in resampling.hpp.
    return num.get_d() / den.get_d();
  }
}

template <Scalar S>
S from_bigint(const BigInt& v) {
  if constexpr (is_exact_v<S>) {
    return Rational(v);
  } else {
    return v.get_d();
  }
}

template <Scalar S>
S from_int(long v) {
  return S(v);
}

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double v) { return v; }

inline Rational abs_value(const Rational& q) { return abs(q); }
inline double abs_value(double v) { return std::fabs(v); }

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_zero(double v) { return v == 0.0; }

/// "p/q" (or "p" for integers) in exact mode; shortest round-trip decimal for doubles.
std::string to_string(const Rational& q);
std::string to_string(double v);

/// Accepts "p/q", integers, and decimal literals such as "-0.125" or "1e-3".
/// Decimal literals are converted exactly in rational mode.
Rational parse_rational(std::string_view text);
double parse_double(std::string_view text);

template <Scalar S>
S parse_scalar(std::string_view text) {
  if constexpr (is_exact_v<S>) {
    return parse_rational(text);
  } else {
    return parse_double(text);
  }
}

}  // namespace latboot
