#pragma once

#include <mutex>
#include <unordered_map>

#include "rbm/martingale/martingale.hpp"
#include "rbm/realfun/real_function.hpp"
#include "rbm/realfun/robin_hood.hpp"

namespace rbm {

namespace nodes {

/// Λ(d): the regular martingale built from d with the Robin Hood function.
///
/// Ideal recursion, for u along the path and b the next bit:
///   Λ(λ) = d(λ);
///   Λ(ub) = Λ(u) when ν(u) = 0 or ν(ub|u) ∈ {0, 1};
///   Λ(ub) = rh^(b)_α(g_0, g_1) with α = ν(u0|u), g_c = Λ(u) - d(u) + d(uc).
///
/// When d is exact the recursion runs in exact rationals and is memoized.
/// Otherwise approx() follows the approximation clauses: zero masses are
/// detected by the threshold ν(x) < 2^-l(|x|), and the working precision
/// grows by ceil(log2(1/min(α, 1-α))) per Robin Hood step so that the
/// propagated error stays below 2^-r.
class Regularized final : public MartingaleNode {
 public:
  Regularized(NodePtr d, ProbabilityMeasure nu) : d_(std::move(d)), nu_(std::move(nu)) {}

  bool exact_capable() const override { return d_->exact_capable(); }

  std::optional<Rational> exact(const BitString& w) const override {
    if (!d_->exact_capable()) return std::nullopt;
    std::lock_guard<std::mutex> lock(mutex_);
    std::size_t known = 0;
    Rational value;
    for (std::size_t n = w.size() + 1; n-- > 0;) {
      auto it = memo_.find(w.prefix(n));
      if (it != memo_.end()) {
        known = n;
        value = it->second;
        break;
      }
      if (n == 0) {
        value = *d_->exact(BitString());
        memo_.emplace(BitString(), value);
      }
    }
    for (std::size_t n = known; n < w.size(); ++n) {
      const BitString u = w.prefix(n);
      const auto [c0, c1] = children(u, value);
      memo_.emplace(u.with(0), c0);
      memo_.emplace(u.with(1), c1);
      value = w[n] ? c1 : c0;
    }
    return value;
  }

  Dyadic approx(Precision r, const BitString& w) const override {
    if (d_->exact_capable()) return canonical(*exact(w), r);
    const Witness& l = nu_.witness();
    auto negligible = [&](const BitString& x) {
      return nu_.mass(x) < Dyadic::unit_fraction(static_cast<Precision>(l(x.size())));
    };
    // Working precision: r + 4 + sum of per-step Lipschitz exponents.
    Precision q = r + 4;
    for (std::size_t n = 0; n < w.size(); ++n) {
      const BitString u = w.prefix(n);
      if (negligible(u) || negligible(u.with(0)) || negligible(u.with(1))) continue;
      const Rational alpha = nu_.conditional(u.with(0), u);
      q += ceil_log2(1 / std::min(alpha, Rational(1 - alpha)));
    }
    Rational value = d_->approx(q, BitString()).to_rational();
    for (std::size_t n = 0; n < w.size(); ++n) {
      const BitString u = w.prefix(n);
      if (negligible(u) || negligible(u.with(0)) || negligible(u.with(1))) continue;
      const Rational alpha = nu_.conditional(u.with(0), u);
      const Rational base = value - d_->approx(q, u).to_rational();
      const Rational g0 = base + d_->approx(q, u.with(0)).to_rational();
      const Rational g1 = base + d_->approx(q, u.with(1)).to_rational();
      const auto [o0, o1] = robin_hood_extended(alpha, g0, g1);
      value = round_canonical(w[n] ? o1 : o0, q).to_rational();
    }
    return round_canonical(value, r);
  }

  std::string describe() const override { return "regularization of " + d_->describe(); }

 private:
  std::pair<Rational, Rational> children(const BitString& u, const Rational& lu) const {
    const Dyadic mu = nu_.mass(u);
    if (mu.is_zero()) return {lu, lu};
    const Dyadic m0 = nu_.mass(u.with(0));
    if (m0.is_zero() || m0 == mu) return {lu, lu};
    const Rational alpha = m0.to_rational() / mu.to_rational();
    const Rational base = lu - *d_->exact(u);
    return robin_hood(alpha, base + *d_->exact(u.with(0)), base + *d_->exact(u.with(1)));
  }

  NodePtr d_;
  ProbabilityMeasure nu_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<BitString, Rational> memo_;
};

}  // namespace nodes

/// Λ(d): the regular martingale covering at least what d covers.
inline Martingale regularize(const Martingale& d) {
  return Martingale(std::make_shared<nodes::Regularized>(d.node(), d.measure()), d.measure());
}

}  // namespace rbm
