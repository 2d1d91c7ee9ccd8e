#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rbm/splitting/operator.hpp"

namespace rbm {

/// A family of splitting operators Φ_k with a convergence modulus Γ: for
/// k >= Γ(t, r, d, w), Φ^a_{k,r}(d)(w) is within 2^-t of the limit.
struct ModulatedSequence {
  using Family = std::function<MartingalePair(std::size_t k, Precision r, const Martingale& d)>;
  using Gamma =
      std::function<std::size_t(Precision t, Precision r, const Martingale& d, const BitString& w)>;

  ProbabilityMeasure nu;
  Family family;
  Gamma gamma;
  /// Index from which every member is identical, when known.
  std::optional<std::size_t> stable_from;
  /// Whether Φ⁺_{k,r}(d) is promised nondecreasing in k.
  bool monotone_plus = false;
  std::string description;
};

inline ModulatedSequence::Gamma constant_gamma(std::size_t k) {
  return [k](Precision, Precision, const Martingale&, const BitString&) { return k; };
}

/// Φ_k = members[min(k, n-1)]. The default modulus is n-1, where the
/// sequence becomes constant.
inline ModulatedSequence finite_sequence(std::vector<SplittingOperator> members,
                                         std::optional<std::size_t> gamma = std::nullopt) {
  if (members.empty()) throw PreconditionError("finite_sequence: no members");
  for (const auto& m : members) {
    if (!(m.measure() == members.front().measure())) {
      throw MeasureMismatch("finite_sequence: members over different measures");
    }
  }
  const std::size_t last = members.size() - 1;
  std::string text = "(limit";
  for (const auto& m : members) text += " " + m.describe();
  if (gamma) text += " (gamma " + std::to_string(*gamma) + ")";
  text += ")";
  const ProbabilityMeasure nu = members.front().measure();
  auto family = [members = std::move(members), last](std::size_t k, Precision r,
                                                     const Martingale& d) {
    return members[std::min(k, last)](r, d);
  };
  return ModulatedSequence{nu, std::move(family), constant_gamma(gamma.value_or(last)), last, false,
                           std::move(text)};
}

/// Union sequence of null sets: Ψ_{k,r}(d) = (Σ_{j<=k} Φ⁺_{j,j+r+1}(1), d).
/// Families are finite; Ψ_k is constant from k = n-1 on.
inline ModulatedSequence union_sequence(std::vector<SplittingOperator> members) {
  if (members.empty()) throw PreconditionError("union_sequence: no members");
  for (const auto& m : members) {
    if (!(m.measure() == members.front().measure())) {
      throw MeasureMismatch("union_sequence: members over different measures");
    }
    require_null(m, "union_sequence");
  }
  const std::size_t last = members.size() - 1;
  std::string text = "(null-union";
  for (const auto& m : members) text += " " + m.describe();
  text += ")";
  const ProbabilityMeasure nu = members.front().measure();
  auto family = [members = std::move(members), last, nu](std::size_t k, Precision r,
                                                         const Martingale& d) {
    std::vector<Martingale> terms;
    for (std::size_t j = 0; j <= std::min(k, last); ++j) {
      terms.push_back(members[j].plus(static_cast<Precision>(j) + r + 1, unit(nu)));
    }
    return MartingalePair{terms.size() == 1 ? terms.front() : sum(terms), d};
  };
  return ModulatedSequence{nu, std::move(family), constant_gamma(last), last, true, std::move(text)};
}

namespace nodes {

/// Φ⁺_{∞,r}(d), reached through the modulus. approx(t, w) evaluates member
/// k = Γ(t+2, r, d, w) at precision t+2 and rounds to grid t. The member at
/// 2k+1 is evaluated too; a gap above 2^-t, or a decrease for monotone
/// sequences, means Γ broke its promise.
class LimitPlus final : public MartingaleNode {
 public:
  LimitPlus(ModulatedSequence seq, Precision r, Martingale d)
      : seq_(std::move(seq)), r_(r), d_(std::move(d)) {}

  bool exact_capable() const override {
    return seq_.stable_from && member(*seq_.stable_from).exact_capable();
  }
  std::optional<Rational> exact(const BitString& w) const override {
    if (!seq_.stable_from) return std::nullopt;
    return member(*seq_.stable_from).exact(w);
  }
  Dyadic approx(Precision t, const BitString& w) const override {
    const std::size_t k = seq_.gamma(t + 2, r_, d_, w);
    const Dyadic here = member(k).approx(t + 2, w);
    const Dyadic ahead = member(2 * k + 1).approx(t + 2, w);
    if (abs(ahead - here) > Dyadic::unit_fraction(t) ||
        (seq_.monotone_plus && ahead < here - Dyadic::unit_fraction(t + 1))) {
      throw ModulusViolation(seq_.description + ": modulus gave k = " + std::to_string(k) +
                             " at " + w.str() + " for precision " + std::to_string(t) +
                             ", but members " + std::to_string(k) + " and " +
                             std::to_string(2 * k + 1) + " differ: " + here.str() + " vs " +
                             ahead.str());
    }
    return here.round_to(t);
  }
  std::string describe() const override { return "limit of " + seq_.description; }

 private:
  Martingale member(std::size_t k) const { return seq_.family(k, r_, d_).plus; }

  ModulatedSequence seq_;
  Precision r_;
  Martingale d_;
};

}  // namespace nodes

/// Θ(r, d) = (Φ⁺_{∞,r+1}(d), Φ⁻_{m,r+1}(d)) with m = Γ(r+1, r+1, d, λ).
inline SplittingOperator limit_measurement(const ModulatedSequence& seq) {
  return SplittingOperator(
      seq.nu,
      [seq](Precision r, const Martingale& d) {
        const std::size_t m = seq.gamma(r + 1, r + 1, d, BitString());
        auto plus = std::make_shared<nodes::LimitPlus>(seq, r + 1, d);
        return MartingalePair{Martingale(plus, seq.nu), seq.family(m, r + 1, d).minus};
      },
      seq.description);
}

}  // namespace rbm
