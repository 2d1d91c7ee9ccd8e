#pragma once

#include <compare>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "rbm/core/numeric.hpp"

namespace rbm {

/// Exact value mantissa * 2^-precision.
///
/// Always normalized: the mantissa is odd unless precision is 0, so equal
/// values have identical representations and equality is structural.
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(long long value) : mantissa_(value) {}  // NOLINT(google-explicit-constructor)
  explicit Dyadic(Integer value) : mantissa_(std::move(value)) {}
  Dyadic(Integer mantissa, Precision precision)
      : mantissa_(std::move(mantissa)), precision_(precision) {
    normalize();
  }

  /// 2^-k.
  static Dyadic unit_fraction(Precision k) { return Dyadic(Integer(1), k); }

  const Integer& mantissa() const noexcept { return mantissa_; }
  Precision precision() const noexcept { return precision_; }

  /// Mantissa when the value is written on the grid 2^-r. Requires precision() <= r.
  Integer mantissa_at(Precision r) const {
    if (precision_ > r) {
      throw PreconditionError("dyadic " + str() + " is not on the 2^-" + std::to_string(r) +
                              " grid");
    }
    return mantissa_ << (r - precision_);
  }

  bool on_grid(Precision r) const noexcept { return precision_ <= r; }

  /// Largest grid-r point not above this value.
  Dyadic floor_to(Precision r) const {
    if (precision_ <= r) return *this;
    return Dyadic(floor_shift(mantissa_, precision_ - r), r);
  }

  /// Nearest grid-r point, ties rounded up.
  Dyadic round_to(Precision r) const {
    if (precision_ <= r) return *this;
    return (*this + unit_fraction(r + 1)).floor_to(r);
  }

  Rational to_rational() const { return Rational(mantissa_, pow2(precision_)); }

  bool is_zero() const noexcept { return mantissa_ == 0; }
  int sign() const noexcept { return mantissa_.sign(); }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.precision_ >= b.precision_) {
      return Dyadic(a.mantissa_ + (b.mantissa_ << (a.precision_ - b.precision_)), a.precision_);
    }
    return Dyadic((a.mantissa_ << (b.precision_ - a.precision_)) + b.mantissa_, b.precision_);
  }
  friend Dyadic operator-(const Dyadic& a) { return Dyadic(Integer(-a.mantissa_), a.precision_); }
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    return Dyadic(a.mantissa_ * b.mantissa_, a.precision_ + b.precision_);
  }
  Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
  Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
  Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

  /// Multiplies by 2^k (k may be negative).
  Dyadic scaled(long long k) const {
    if (k >= 0) {
      const auto up = static_cast<Precision>(k);
      if (up <= precision_) return Dyadic(mantissa_, precision_ - up);
      return Dyadic(mantissa_ << (up - precision_), 0);
    }
    return Dyadic(mantissa_, precision_ + static_cast<Precision>(-k));
  }

  friend bool operator==(const Dyadic& a, const Dyadic& b) = default;
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    const Integer lhs = a.precision_ >= b.precision_ ? a.mantissa_
                                                     : Integer(a.mantissa_ << (b.precision_ - a.precision_));
    const Integer rhs = b.precision_ >= a.precision_ ? b.mantissa_
                                                     : Integer(b.mantissa_ << (a.precision_ - b.precision_));
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  /// `mantissa/2^precision`.
  std::string str() const { return mantissa_.str() + "/2^" + std::to_string(precision_); }
  /// `mantissa/2^r` with the mantissa taken on grid r (requires precision() <= r).
  std::string str_at(Precision r) const { return mantissa_at(r).str() + "/2^" + std::to_string(r); }

  friend std::ostream& operator<<(std::ostream& os, const Dyadic& d) { return os << d.str(); }

 private:
  void normalize() {
    if (mantissa_ == 0) {
      precision_ = 0;
      return;
    }
    if (precision_ == 0) return;
    const auto zeros = static_cast<Precision>(boost::multiprecision::lsb(
        mantissa_ < 0 ? Integer(-mantissa_) : mantissa_));
    const Precision strip = zeros < precision_ ? zeros : precision_;
    if (strip > 0) {
      mantissa_ >>= strip;  // exact: the low bits are zero
      precision_ -= strip;
    }
  }

  Integer mantissa_{0};
  Precision precision_{0};
};

inline Dyadic min(const Dyadic& a, const Dyadic& b) { return b < a ? b : a; }
inline Dyadic max(const Dyadic& a, const Dyadic& b) { return a < b ? b : a; }
inline Dyadic abs(const Dyadic& a) { return a.sign() < 0 ? -a : a; }

/// The canonical computation of an exact value at precision r: floor(q 2^r) 2^-r.
/// It is on grid r and within 2^-r of q, and it has the sign of q.
inline Dyadic canonical(const Rational& q, Precision r) {
  const Integer num = boost::multiprecision::numerator(q) << r;
  return Dyadic(floor_div(num, boost::multiprecision::denominator(q)), r);
}

inline std::optional<Dyadic> to_dyadic(const Rational& q) {
  const Integer& den = boost::multiprecision::denominator(q);
  if (!is_power_of_two(den)) return std::nullopt;
  return Dyadic(boost::multiprecision::numerator(q), static_cast<Precision>(floor_log2(den)));
}

/// Accepts `m/2^k`, integers, and `p/q` with q a power of two.
inline Dyadic parse_dyadic(std::string_view text) {
  const Rational q = parse_rational(text);
  auto d = to_dyadic(q);
  if (!d) throw ParseError("'" + std::string(text) + "' is not a dyadic rational");
  return *d;
}

}  // namespace rbm
