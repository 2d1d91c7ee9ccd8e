#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rbm/martingale.hpp"

namespace rbm {

struct MartingalePair {
  Martingale plus;
  Martingale minus;
};

/// A ν-splitting operator (r, d) ↦ (Φ_r⁺(d), Φ_r⁻(d)).
class SplittingOperator {
 public:
  using Apply = std::function<MartingalePair(Precision, const Martingale&)>;

  SplittingOperator(ProbabilityMeasure nu, Apply apply, std::string description)
      : nu_(std::move(nu)), apply_(std::move(apply)), description_(std::move(description)) {}

  MartingalePair operator()(Precision r, const Martingale& d) const {
    if (!(d.measure() == nu_)) {
      throw MeasureMismatch(description_ + ": operator over " + nu_.name() +
                            " applied to a martingale over " + d.measure().name());
    }
    return apply_(r, d);
  }
  Martingale plus(Precision r, const Martingale& d) const { return (*this)(r, d).plus; }
  Martingale minus(Precision r, const Martingale& d) const { return (*this)(r, d).minus; }

  const ProbabilityMeasure& measure() const noexcept { return nu_; }
  const std::string& describe() const noexcept { return description_; }

 private:
  ProbabilityMeasure nu_;
  Apply apply_;
  std::string description_;
};

namespace nodes {

/// 1 on the cylinder C_w, 0 elsewhere. A ν-martingale when ν(w) = 0.
class CylinderIndicator final : public MartingaleNode {
 public:
  explicit CylinderIndicator(BitString w) : w_(std::move(w)) {}
  bool exact_capable() const override { return true; }
  std::optional<Rational> exact(const BitString& v) const override {
    return Rational(w_.is_prefix_of(v) ? 1 : 0);
  }
  std::string describe() const override { return "indicator of C_" + w_.str(); }

 private:
  BitString w_;
};

/// The C_w share of D: D(w)·ν(w|v) above w, D(v) inside C_w, 0 elsewhere.
class CylinderShare final : public MartingaleNode {
 public:
  CylinderShare(NodePtr d, BitString w, ProbabilityMeasure nu)
      : d_(std::move(d)), w_(std::move(w)), nu_(std::move(nu)) {}
  bool exact_capable() const override { return d_->exact_capable(); }
  std::optional<Rational> exact(const BitString& v) const override {
    if (w_.is_prefix_of(v)) return d_->exact(v);
    if (!v.is_prefix_of(w_)) return Rational(0);
    auto dw = d_->exact(w_);
    if (!dw) return std::nullopt;
    return *dw * conditional_b(nu_, w_, v);
  }
  Dyadic approx(Precision r, const BitString& v) const override {
    if (d_->exact_capable()) return canonical(*exact(v), r);
    if (w_.is_prefix_of(v)) return d_->approx(r, v);
    if (!v.is_prefix_of(w_)) return Dyadic();
    // B <= 1, so the error of D(w) at r+2 stays below 2^-(r+2) after scaling.
    return round_canonical(d_->approx(r + 2, w_).to_rational() * conditional_b(nu_, w_, v), r);
  }
  std::string describe() const override { return "C_" + w_.str() + " share of " + d_->describe(); }

 private:
  NodePtr d_;
  BitString w_;
  ProbabilityMeasure nu_;
};

}  // namespace nodes

/// Measurement of C_w when ν(w) = 0: Φ⁺ is the indicator of C_w, Φ⁻ = d.
inline SplittingOperator cylinder_null(const BitString& w, const ProbabilityMeasure& nu) {
  if (w.empty()) throw PreconditionError("cylinder_null: w must be nonempty");
  if (!nu.mass(w).is_zero()) {
    throw PreconditionError("cylinder_null: " + nu.name() + "(" + w.str() + ") = " +
                            nu.mass(w).str() + " is not 0");
  }
  auto indicator = std::make_shared<nodes::CylinderIndicator>(w);
  return SplittingOperator(
      nu,
      [indicator, nu](Precision, const Martingale& d) {
        return MartingalePair{Martingale(indicator, nu), d};
      },
      "(cyl " + w.str() + ")");
}

/// Measurement of C_w when ν(w) > 0: with D = Λ(d), Φ⁺ is the C_w share of D
/// and Φ⁻ = D - Φ⁺.
inline SplittingOperator cylinder_pos(const BitString& w, const ProbabilityMeasure& nu) {
  if (nu.mass(w).is_zero()) {
    throw PreconditionError("cylinder_pos: " + nu.name() + "(" + w.str() + ") = 0");
  }
  return SplittingOperator(
      nu,
      [w, nu](Precision, const Martingale& d) {
        const Martingale reg = regularize(d);
        auto share = std::make_shared<nodes::CylinderShare>(reg.node(), w, nu);
        return MartingalePair{Martingale(share, nu),
                              Martingale(std::make_shared<nodes::Difference>(reg.node(), share), nu)};
      },
      "(cyl " + w.str() + ")");
}

/// Picks the null or positive construction from ν(w).
inline SplittingOperator cylinder(const BitString& w, const ProbabilityMeasure& nu) {
  if (!w.empty() && nu.mass(w).is_zero()) return cylinder_null(w, nu);
  return cylinder_pos(w, nu);
}

/// Measurement of the complement: the components trade places.
inline SplittingOperator complement(const SplittingOperator& phi) {
  return SplittingOperator(
      phi.measure(),
      [phi](Precision r, const Martingale& d) {
        auto [p, m] = phi(r, d);
        return MartingalePair{m, p};
      },
      "(compl " + phi.describe() + ")");
}

/// Θ[ab](r, d) = Ψ^b_{r+2}(Φ^a_{r+1}(d)).
inline Martingale theta(bool a, bool b, const SplittingOperator& phi, const SplittingOperator& psi,
                        Precision r, const Martingale& d) {
  if (!(phi.measure() == psi.measure())) {
    throw MeasureMismatch("theta: " + phi.describe() + " and " + psi.describe() +
                          " use different measures");
  }
  const auto outer = phi(r + 1, d);
  const auto inner = psi(r + 2, a ? outer.plus : outer.minus);
  return b ? inner.plus : inner.minus;
}

enum class SetOp { intersection, union_ };

/// Θ[X∩Y] = (Θ++, Θ+- + Θ-+ + Θ--) and Θ[X∪Y] = (Θ++ + Θ+- + Θ-+, Θ--).
inline SplittingOperator intersect_union(const SplittingOperator& phi, const SplittingOperator& psi,
                                         SetOp which) {
  if (!(phi.measure() == psi.measure())) {
    throw MeasureMismatch("intersect_union: " + phi.describe() + " and " + psi.describe() +
                          " use different measures");
  }
  const std::string name = which == SetOp::intersection ? "cap" : "cup";
  return SplittingOperator(
      phi.measure(),
      [phi, psi, which](Precision r, const Martingale& d) {
        const auto outer = phi(r + 1, d);
        const auto yes = psi(r + 2, outer.plus);
        const auto no = psi(r + 2, outer.minus);
        if (which == SetOp::intersection) {
          return MartingalePair{yes.plus, sum({yes.minus, no.plus, no.minus})};
        }
        return MartingalePair{sum({yes.plus, yes.minus, no.plus}), no.minus};
      },
      "(" + name + " " + phi.describe() + " " + psi.describe() + ")");
}

inline SplittingOperator intersect(const SplittingOperator& phi, const SplittingOperator& psi) {
  return intersect_union(phi, psi, SetOp::intersection);
}

inline SplittingOperator unite(const SplittingOperator& phi, const SplittingOperator& psi) {
  return intersect_union(phi, psi, SetOp::union_);
}

/// Canonical computation of the measured value: Φ⁺_{r+2}(1)(λ) queried at
/// precision r+2 and rounded to grid r.
inline Dyadic measure_value(const SplittingOperator& phi, Precision r) {
  const Martingale plus = phi.plus(r + 2, unit(phi.measure()));
  return plus.approx(r + 2, BitString()).round_to(r);
}

inline constexpr Precision kNullCheckPrecision = 10;

inline void require_null(const SplittingOperator& phi, const char* op,
                         Precision r = kNullCheckPrecision) {
  const Dyadic v = measure_value(phi, r);
  if (v > Dyadic::unit_fraction(r)) {
    throw PreconditionError(std::string(op) + ": " + phi.describe() + " has value " + v.str_at(r) +
                            ", not a null set at precision " + std::to_string(r));
  }
}

/// Measurement of any subset of a null set Y measured by Φ: (Φ_r⁺(1), d).
inline SplittingOperator complete_null(const SplittingOperator& phi) {
  require_null(phi, "complete_null");
  return SplittingOperator(
      phi.measure(),
      [phi](Precision r, const Martingale& d) {
        return MartingalePair{phi.plus(r, unit(phi.measure())), d};
      },
      "(complete " + phi.describe() + ")");
}

/// Axiom (iii): Φ_r⁺(d)(λ) + Φ_r⁻(d)(λ) <= d(λ) + 2^-r. Exact when all three
/// values are; otherwise decided from approximations at r + 4 with their
/// error budget added to the right-hand side.
inline bool satisfies_axiom_iii(const SplittingOperator& phi, Precision r, const Martingale& d) {
  const auto [p, m] = phi(r, d);
  const BitString root;
  if (p.exact_capable() && m.exact_capable() && d.exact_capable()) {
    return p.value(root) + m.value(root) <= d.value(root) + Rational(1, pow2(r));
  }
  const Precision q = r + 4;
  const Dyadic lhs = p.approx(q, root) + m.approx(q, root);
  return lhs <= d.approx(q, root) + Dyadic::unit_fraction(r) + Dyadic(3, q);
}

/// Two measurements of complementary sets: with d = ADD(Φ_j⁺(1), Ψ_k⁺(1)),
/// d(λ) >= 1 - 2^-min(j,k).
inline bool two_measurement_check(const SplittingOperator& phi, const SplittingOperator& psi,
                                  Precision j, Precision k) {
  const Martingale d = add(phi.plus(j, unit(phi.measure())), psi.plus(k, unit(psi.measure())));
  const Precision s = std::min(j, k);
  const Rational bound = 1 - Rational(1, pow2(s));
  if (d.exact_capable()) return d.value(BitString()) >= bound;
  const Precision q = s + 2;
  return d.approx(q, BitString()).to_rational() >= bound - Rational(1, pow2(q));
}

}  // namespace rbm
