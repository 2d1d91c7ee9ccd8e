#pragma once

#include <utility>

#include "rbm/core.hpp"

namespace rbm {

using RationalPair = std::pair<Rational, Rational>;

inline void require_open_unit(const Rational& alpha, const char* what) {
  if (alpha <= 0 || alpha >= 1) {
    throw DomainError(std::string(what) + ": alpha = " + format_rational(alpha) + " is not in (0,1)");
  }
}

/// m_α(s, t) = αs + (1-α)t.
inline Rational weighted_average(const Rational& alpha, const Rational& s, const Rational& t) {
  return alpha * s + (1 - alpha) * t;
}

/// (s, t) ∈ D_α = [0,∞)^2 ∪ H_α.
inline bool in_robin_hood_domain(const Rational& alpha, const Rational& s, const Rational& t) {
  return (s >= 0 && t >= 0) || weighted_average(alpha, s, t) >= 1;
}

/// The Robin Hood function rh_α on D_α, evaluated exactly by its four cases.
inline RationalPair robin_hood(const Rational& alpha, const Rational& s, const Rational& t) {
  require_open_unit(alpha, "rh");
  if (!in_robin_hood_domain(alpha, s, t)) {
    throw DomainError("rh: (" + format_rational(s) + ", " + format_rational(t) +
                      ") is outside D_alpha for alpha = " + format_rational(alpha));
  }
  if (s >= 0 && s <= 1 && t >= 0 && t <= 1) return {s, t};
  const Rational m = weighted_average(alpha, s, t);
  if (m >= 1) return {m, m};
  if (s >= 1 && t >= 0) return {Rational(1), weighted_average(alpha, s - 1, t) / (1 - alpha)};
  // Remaining points of D_α have t >= 1 and s >= 0.
  return {weighted_average(alpha, s, t - 1) / alpha, Rational(1)};
}

/// A continuous extension of rh_α to the whole plane, used when (s, t) is only
/// known approximately and may sit just outside D_α. Agrees with rh_α on D_α
/// and is Lipschitz with constant 1/min(α, 1-α) in the sup norm.
inline RationalPair robin_hood_extended(const Rational& alpha, const Rational& s,
                                        const Rational& t) {
  require_open_unit(alpha, "rh");
  const Rational m = weighted_average(alpha, s, t);
  if (m >= 1) return {m, m};
  if (s >= 1) return {Rational(1), weighted_average(alpha, s - 1, t) / (1 - alpha)};
  if (t >= 1) return {weighted_average(alpha, s, t - 1) / alpha, Rational(1)};
  auto clamp = [](const Rational& x) -> Rational {
    if (x < 0) return 0;
    if (x > 1) return 1;
    return x;
  };
  return {clamp(s), clamp(t)};
}

}  // namespace rbm
