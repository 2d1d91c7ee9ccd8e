#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "rbm/core/errors.hpp"

namespace rbm {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Number of bits after the binary point of a dyadic value.
using Precision = std::uint32_t;

inline Integer pow2(std::uint64_t k) {
  Integer one = 1;
  return one << k;
}

/// floor(a / 2^k), correct for negative a.
inline Integer floor_shift(const Integer& a, std::uint64_t k) {
  if (k == 0 || a == 0) return a;
  if (a > 0) return a >> k;
  Integer neg = -a;
  Integer q = neg >> k;
  if ((q << k) != neg) ++q;
  return -q;
}

/// floor(a / b) for b > 0.
inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;  // truncates toward zero
  if ((a % b != 0) && (a < 0)) --q;
  return q;
}

inline bool is_power_of_two(const Integer& n) {
  return n > 0 && (n & (n - 1)) == 0;
}

/// Index of the highest set bit; floor(log2 n) for n >= 1.
inline std::uint64_t floor_log2(const Integer& n) {
  return static_cast<std::uint64_t>(boost::multiprecision::msb(n));
}

inline std::uint64_t bit_length(const Integer& n) {
  if (n == 0) return 0;
  Integer m = n < 0 ? Integer(-n) : n;
  return floor_log2(m) + 1;
}

inline bool is_dyadic(const Rational& q) {
  return is_power_of_two(boost::multiprecision::denominator(q));
}

/// `p/q`, or `p` when the value is an integer.
inline std::string format_rational(const Rational& q) {
  const Integer& den = boost::multiprecision::denominator(q);
  if (den == 1) return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" + den.str();
}

namespace detail {

inline Integer parse_integer(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
  if (i == text.size()) throw ParseError("expected an integer, got '" + std::string(text) + "'");
  for (std::size_t j = i; j < text.size(); ++j) {
    if (text[j] < '0' || text[j] > '9') {
      throw ParseError("expected an integer, got '" + std::string(text) + "'");
    }
  }
  return Integer(std::string(text[0] == '+' ? text.substr(1) : text));
}

}  // namespace detail

/// Accepts `p`, `p/q` and `p/2^k`.
inline Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(detail::parse_integer(text));
  const Integer num = detail::parse_integer(text.substr(0, slash));
  std::string_view rest = text.substr(slash + 1);
  Integer den;
  if (rest.size() > 2 && rest.substr(0, 2) == "2^") {
    const Integer k = detail::parse_integer(rest.substr(2));
    if (k < 0 || k > 1'000'000) throw ParseError("bad exponent in '" + std::string(text) + "'");
    den = pow2(static_cast<std::uint64_t>(k));
  } else {
    den = detail::parse_integer(rest);
  }
  if (den <= 0) throw ParseError("non-positive denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

}  // namespace rbm
