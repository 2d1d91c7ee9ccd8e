#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rbm/martingale.hpp"

namespace rbm {

/// A string map with x ⊏ δ(x); checked on every application.
class Constructor {
 public:
  using Step = std::function<BitString(const BitString&)>;

  explicit Constructor(Step step, std::string name = "constructor")
      : step_(std::move(step)), name_(std::move(name)) {}

  BitString operator()(const BitString& x) const {
    BitString y = step_(x);
    if (!x.is_proper_prefix_of(y)) {
      throw PreconditionError(name_ + " maps " + x.str() + " to " + y.str() +
                              ", which does not properly extend it");
    }
    return y;
  }

  const std::string& name() const noexcept { return name_; }

 private:
  Step step_;
  std::string name_;
};

/// The first n bits of R(δ).
inline BitString result_prefix(const Constructor& delta, std::size_t n) {
  BitString x;
  while (x.size() < n) x = delta(x);
  return x.prefix(n);
}

/// E(d, m, w): w from proper prefixes of w; otherwise the child whose capital,
/// computed at precision |x| + m + 2, is smaller (ties go to x0).
inline Constructor diagonalize(const Martingale& d, Precision m, const BitString& w) {
  return Constructor(
      [d, m, w](const BitString& x) {
        if (x.is_proper_prefix_of(w)) return w;
        const Precision a = static_cast<Precision>(x.size()) + m + 2;
        const BitString x0 = x.with(0);
        const BitString x1 = x.with(1);
        return d.approx(a, x0) <= d.approx(a, x1) ? x0 : x1;
      },
      "E(" + d.describe() + ", " + std::to_string(m) + ", " + w.str() + ")");
}

/// d(x) when exact, otherwise a precision-q approximation with its error bound
/// folded in, so that the returned value is an upper bound.
inline Rational capital_upper_bound(const Martingale& d, const BitString& x, Precision q = 64) {
  if (d.exact_capable()) return d.value(x);
  return d.approx(q, x).to_rational() + Rational(1, pow2(q));
}

/// Least m >= 1 with d(w') <= 1 - 2^(1-m) for every prefix w' of w.
inline Precision least_escape_margin(const Martingale& d, const BitString& w) {
  Rational top = 0;
  for (std::size_t n = 0; n <= w.size(); ++n) top = std::max(top, capital_upper_bound(d, w.prefix(n)));
  if (top >= 1) {
    throw PreconditionError("no escape margin: capital reaches " + format_rational(top) +
                            " along " + w.str());
  }
  Precision m = 1;
  while (top > 1 - Rational(1, pow2(m - 1))) {
    if (++m > 4096) throw ResourceError("escape margin exceeds 4096 bits");
  }
  return m;
}

struct ConservationStep {
  std::size_t step;
  std::optional<bool> bit;
  Dyadic capital;
};

struct ConservationReport {
  BitString prefix;
  std::vector<ConservationStep> steps;
  Rational max_capital;
  bool escaped;

  /// Lines `step bit capital_mantissa capital_precision`; step 0 has bit `~`.
  std::string str() const {
    std::string out;
    for (const auto& s : steps) {
      out += std::to_string(s.step) + " " + (s.bit ? (*s.bit ? "1" : "0") : "~") + " " +
             s.capital.mantissa().str() + " " + std::to_string(s.capital.precision()) + "\n";
    }
    return out;
  }
};

/// Runs E(d, m, w) for `depth` bits and records the capital of d along R(δ).
/// Exact dyadic capitals are reported as they are; others at 32 bits.
inline ConservationReport conservation_check(const Martingale& d, const BitString& w, Precision m,
                                             std::size_t depth) {
  const ProbabilityMeasure& nu = d.measure();
  const Rational root = capital_upper_bound(d, BitString());
  if (!(root < nu.mass_rational(w))) {
    throw PreconditionError("conservation_check: d(~) = " + format_rational(root) +
                            " is not below " + nu.name() + "(" + w.str() + ") = " +
                            nu.mass(w).str());
  }
  const BitString prefix = result_prefix(diagonalize(d, m, w), depth);
  ConservationReport report{prefix, {}, 0, true};
  for (std::size_t k = 0; k <= depth; ++k) {
    const BitString x = prefix.prefix(k);
    Dyadic shown;
    Rational bound;
    std::optional<Rational> exact = d.exact_capable() ? d.exact(x) : std::nullopt;
    if (exact && is_dyadic(*exact)) {
      shown = *to_dyadic(*exact);
      bound = *exact;
    } else {
      shown = d.approx(32, x);
      bound = exact ? *exact : shown.to_rational() + Rational(1, pow2(32));
    }
    report.steps.push_back({k, k == 0 ? std::nullopt : std::optional<bool>(prefix[k - 1]), shown});
    report.max_capital = std::max(report.max_capital, bound);
    if (bound >= 1) report.escaped = false;
  }
  return report;
}

}  // namespace rbm
