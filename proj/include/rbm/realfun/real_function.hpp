#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rbm/core.hpp"
#include "rbm/realfun/robin_hood.hpp"

namespace rbm {

/// A uniformly continuous function R^p -> R^q given by approximations and a
/// modulus: approx(n, x) is within 2^-n of f(x) in every coordinate, and
/// |f(x) - f(y)| <= 2^-n whenever |x - y| <= 2^-modulus(n).
class RealFunction {
 public:
  using Approx = std::function<std::vector<Dyadic>(Precision, std::span<const Dyadic>)>;
  using Modulus = std::function<Precision(Precision)>;

  RealFunction(std::size_t arity, std::size_t coarity, Approx approx, Modulus modulus)
      : arity_(arity), coarity_(coarity), approx_(std::move(approx)), modulus_(std::move(modulus)) {}

  /// Lifts an exact rational-valued map; approximations are floor-canonical on grid n.
  static RealFunction from_exact(
      std::size_t arity, std::size_t coarity,
      std::function<std::vector<Rational>(std::span<const Rational>)> exact, Modulus modulus) {
    auto approx = [exact = std::move(exact)](Precision n, std::span<const Dyadic> x) {
      std::vector<Rational> in;
      in.reserve(x.size());
      for (const Dyadic& d : x) in.push_back(d.to_rational());
      std::vector<Dyadic> out;
      for (const Rational& v : exact(in)) out.push_back(canonical(v, n));
      return out;
    };
    return RealFunction(arity, coarity, std::move(approx), std::move(modulus));
  }

  std::size_t arity() const noexcept { return arity_; }
  std::size_t coarity() const noexcept { return coarity_; }
  Precision modulus(Precision n) const { return modulus_(n); }

  std::vector<Dyadic> approx(Precision n, std::span<const Dyadic> x) const {
    if (x.size() != arity_) {
      throw PreconditionError("real function of arity " + std::to_string(arity_) + " applied to " +
                              std::to_string(x.size()) + " arguments");
    }
    auto out = approx_(n, x);
    if (out.size() != coarity_) throw PreconditionError("real function returned wrong coarity");
    return out;
  }
  std::vector<Dyadic> approx(Precision n, std::initializer_list<Dyadic> x) const {
    return approx(n, std::span<const Dyadic>(x.begin(), x.size()));
  }

 private:
  std::size_t arity_;
  std::size_t coarity_;
  Approx approx_;
  Modulus modulus_;
};

/// h = f where k >= 0, g elsewhere. Continuity of h is the caller's obligation.
///
/// approx(n, x) queries k at precision m(n)+1, m the largest of the three
/// moduli, and answers from f or g at that precision.
inline RealFunction paste(RealFunction f, RealFunction g, RealFunction k) {
  if (f.arity() != g.arity() || f.arity() != k.arity() || f.coarity() != g.coarity() ||
      k.coarity() != 1) {
    throw PreconditionError("paste: f and g must share a signature and k must be scalar over it");
  }
  auto shared = std::make_shared<const std::array<RealFunction, 3>>(
      std::array<RealFunction, 3>{std::move(f), std::move(g), std::move(k)});
  auto modulus = [shared](Precision n) {
    const auto& [ff, gg, kk] = *shared;
    return std::max({ff.modulus(n), gg.modulus(n), kk.modulus(n)});
  };
  auto approx = [shared, modulus](Precision n, std::span<const Dyadic> x) {
    const auto& [ff, gg, kk] = *shared;
    const Precision q = modulus(n) + 1;
    if (kk.approx(q, x)[0].sign() >= 0) return ff.approx(q, x);
    return gg.approx(q, x);
  };
  const std::size_t p = shared->at(0).arity();
  const std::size_t c = shared->at(0).coarity();
  return RealFunction(p, c, std::move(approx), std::move(modulus));
}

/// Modulus of a Lipschitz map with constant at most 2^shift.
inline RealFunction::Modulus lipschitz_modulus(Precision shift) {
  return [shift](Precision n) { return n + shift; };
}

inline Precision ceil_log2(const Rational& x) {
  if (x <= 1) return 0;
  const Integer c = floor_div(boost::multiprecision::numerator(x), boost::multiprecision::denominator(x));
  Precision k = static_cast<Precision>(floor_log2(c));
  while (Rational(pow2(k)) < x) ++k;
  return k;
}

/// m_α as a real function of (s, t); Lipschitz with constant 1.
inline RealFunction weighted_avg(const Rational& alpha) {
  require_open_unit(alpha, "m_alpha");
  return RealFunction::from_exact(
      2, 1,
      [alpha](std::span<const Rational> x) {
        return std::vector<Rational>{weighted_average(alpha, x[0], x[1])};
      },
      lipschitz_modulus(1));
}

/// rh_α assembled from nested pastes rh -> rh1 -> rh2 -> rh3 over the
/// guards of its piecewise definition. The moduli are valid on the box
/// |s|, |t| <= 2^bound_log.
inline RealFunction robin_hood_pasted(const Rational& alpha, Precision bound_log = 16) {
  require_open_unit(alpha, "rh");
  const Rational a = alpha;
  const Precision slope = ceil_log2(1 / std::min(a, Rational(1 - a))) + 1;
  // Products of three affine factors on the box: Lipschitz below 3 * (2 * 2^B)^2.
  const Precision cubic = 2 * (bound_log + 1) + 2;
  using V = std::vector<Rational>;
  using S = std::span<const Rational>;
  auto fn = [](std::size_t q, auto body, Precision shift) {
    return RealFunction::from_exact(2, q, body, lipschitz_modulus(shift));
  };
  const RealFunction identity = fn(2, [](S x) { return V{x[0], x[1]}; }, 0);
  const RealFunction both_avg = fn(2, [a](S x) {
    const Rational m = weighted_average(a, x[0], x[1]);
    return V{m, m};
  }, 0);
  const RealFunction lift_t = fn(2, [a](S x) {
    return V{Rational(1), weighted_average(a, x[0] - 1, x[1]) / (1 - a)};
  }, slope);
  const RealFunction lift_s = fn(2, [a](S x) {
    return V{weighted_average(a, x[0], x[1] - 1) / a, Rational(1)};
  }, slope);
  const RealFunction ones = fn(2, [](S) { return V{Rational(1), Rational(1)}; }, 0);

  const RealFunction inside = fn(1, [](S x) {
    return V{std::min((1 - x[0]) * x[0], (1 - x[1]) * x[1])};
  }, bound_log + 2);
  const RealFunction rich = fn(1, [a](S x) { return V{weighted_average(a, x[0], x[1]) - 1}; }, 0);
  const RealFunction guard_s = fn(1, [a](S x) {
    return V{(x[0] - 1) * x[1] * (1 - weighted_average(a, x[0], x[1]))};
  }, cubic);
  const RealFunction guard_t = fn(1, [a](S x) {
    return V{(x[1] - 1) * x[0] * (1 - weighted_average(a, x[0], x[1]))};
  }, cubic);

  const RealFunction rh3 = paste(lift_s, ones, guard_t);
  const RealFunction rh2 = paste(lift_t, rh3, guard_s);
  const RealFunction rh1 = paste(both_avg, rh2, rich);
  return paste(identity, rh1, inside);
}

}  // namespace rbm
