#pragma once

#include <istream>
#include <memory>
#include <sstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rbm/core.hpp"
#include "rbm/measure.hpp"

namespace rbm {

/// Evaluator behind a martingale. exact(w) gives the ideal value when the node
/// can produce it; approx(r, w) is a computation: within 2^-r of the ideal
/// value and on the grid 2^-r.
class MartingaleNode {
 public:
  virtual ~MartingaleNode() = default;

  /// Whether exact() always answers.
  virtual bool exact_capable() const = 0;
  virtual std::optional<Rational> exact(const BitString& w) const = 0;

  virtual Dyadic approx(Precision r, const BitString& w) const {
    auto v = exact(w);
    if (!v) throw PreconditionError(describe() + " has neither an exact value nor an approximation");
    return canonical(*v, r);
  }

  virtual std::string describe() const = 0;
};

using NodePtr = std::shared_ptr<const MartingaleNode>;

/// A ν-martingale: an evaluator paired with its measure.
class Martingale {
 public:
  Martingale(NodePtr node, ProbabilityMeasure nu) : node_(std::move(node)), nu_(std::move(nu)) {}

  const ProbabilityMeasure& measure() const noexcept { return nu_; }
  const NodePtr& node() const noexcept { return node_; }

  bool exact_capable() const { return node_->exact_capable(); }
  std::optional<Rational> exact(const BitString& w) const { return node_->exact(w); }

  /// Exact value; fails for martingales that are only approximable.
  Rational value(const BitString& w) const {
    auto v = node_->exact(w);
    if (!v) throw PreconditionError(node_->describe() + " has no exact value at " + w.str());
    return *v;
  }

  /// Canonical-form computation at precision r.
  Dyadic approx(Precision r, const BitString& w) const { return node_->approx(r, w); }

  std::string describe() const { return node_->describe(); }

 private:
  NodePtr node_;
  ProbabilityMeasure nu_;
};

inline void require_same_measure(const Martingale& a, const Martingale& b, const char* op) {
  if (!(a.measure() == b.measure())) {
    throw MeasureMismatch(std::string(op) + ": martingales over different measures (" +
                          a.measure().name() + " vs " + b.measure().name() + ")");
  }
}

/// Rounds an exact value to the nearest point of grid r (ties up).
inline Dyadic round_canonical(const Rational& v, Precision r) {
  return canonical(v + Rational(1, pow2(r + 1)), r);
}

namespace nodes {

class Constant final : public MartingaleNode {
 public:
  explicit Constant(Rational c) : c_(std::move(c)) {}
  bool exact_capable() const override { return true; }
  std::optional<Rational> exact(const BitString&) const override { return c_; }
  std::string describe() const override { return "constant " + format_rational(c_); }

 private:
  Rational c_;
};

/// Dense table to depth N indexed by the standard enumeration; d(wb) = d(w) below depth N.
class Table final : public MartingaleNode {
 public:
  Table(std::vector<Dyadic> values, std::uint32_t depth)
      : values_(std::move(values)), depth_(depth) {
    if (values_.size() != (std::size_t{1} << (depth_ + 1)) - 1) {
      throw PreconditionError("martingale table size does not match depth " + std::to_string(depth_));
    }
  }
  bool exact_capable() const override { return true; }
  std::optional<Rational> exact(const BitString& w) const override { return at(w).to_rational(); }
  Dyadic approx(Precision r, const BitString& w) const override { return at(w).floor_to(r); }
  std::string describe() const override { return "table depth " + std::to_string(depth_); }

  const Dyadic& at(const BitString& w) const {
    if (w.size() <= depth_) return values_[static_cast<std::size_t>(bton(w))];
    return values_[static_cast<std::size_t>(bton(w.prefix(depth_)))];
  }
  std::uint32_t depth() const noexcept { return depth_; }
  const std::vector<Dyadic>& values() const noexcept { return values_; }

 private:
  std::vector<Dyadic> values_;
  std::uint32_t depth_;
};

/// Pointwise sum. The computation queries every summand at precision
/// r + ceil(log2 n) + 1 (r + 2 for two summands), adds, and rounds to grid r.
class Sum final : public MartingaleNode {
 public:
  explicit Sum(std::vector<NodePtr> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw PreconditionError("sum of no martingales");
    extra_ = 1;
    while ((std::size_t{1} << (extra_ - 1)) < terms_.size()) ++extra_;
  }
  bool exact_capable() const override {
    for (const auto& t : terms_) {
      if (!t->exact_capable()) return false;
    }
    return true;
  }
  std::optional<Rational> exact(const BitString& w) const override {
    Rational s = 0;
    for (const auto& t : terms_) {
      auto v = t->exact(w);
      if (!v) return std::nullopt;
      s += *v;
    }
    return s;
  }
  Dyadic approx(Precision r, const BitString& w) const override {
    Dyadic s;
    for (const auto& t : terms_) s += t->approx(r + extra_, w);
    return s.round_to(r);
  }
  std::string describe() const override { return "sum of " + std::to_string(terms_.size()); }

 private:
  std::vector<NodePtr> terms_;
  Precision extra_ = 1;
};

/// a - b, used where b is dominated by a pointwise.
class Difference final : public MartingaleNode {
 public:
  Difference(NodePtr a, NodePtr b) : a_(std::move(a)), b_(std::move(b)) {}
  bool exact_capable() const override { return a_->exact_capable() && b_->exact_capable(); }
  std::optional<Rational> exact(const BitString& w) const override {
    auto x = a_->exact(w);
    if (!x) return std::nullopt;
    auto y = b_->exact(w);
    if (!y) return std::nullopt;
    return *x - *y;
  }
  Dyadic approx(Precision r, const BitString& w) const override {
    if (exact_capable()) return canonical(*exact(w), r);
    return (a_->approx(r + 2, w) - b_->approx(r + 2, w)).round_to(r);
  }
  std::string describe() const override { return "difference"; }

 private:
  NodePtr a_;
  NodePtr b_;
};

/// Hides exact values so that consumers must go through approximations.
class ApproxOnly final : public MartingaleNode {
 public:
  explicit ApproxOnly(NodePtr inner) : inner_(std::move(inner)) {}
  bool exact_capable() const override { return false; }
  std::optional<Rational> exact(const BitString&) const override { return std::nullopt; }
  Dyadic approx(Precision r, const BitString& w) const override { return inner_->approx(r, w); }
  std::string describe() const override { return "approximation of " + inner_->describe(); }

 private:
  NodePtr inner_;
};

}  // namespace nodes

inline Martingale constant_martingale(const Rational& c, const ProbabilityMeasure& nu) {
  if (c < 0) throw DomainError("constant martingale with negative value " + format_rational(c));
  return Martingale(std::make_shared<nodes::Constant>(c), nu);
}

/// The unit martingale 1(w) = 1.
inline Martingale unit(const ProbabilityMeasure& nu) { return constant_martingale(1, nu); }

/// Table martingale without validation (verify_martingale reports violations).
inline Martingale table_martingale_unchecked(std::vector<Dyadic> values, std::uint32_t depth,
                                             const ProbabilityMeasure& nu) {
  return Martingale(std::make_shared<nodes::Table>(std::move(values), depth), nu);
}

/// ADD(d', d'') = d' + d''.
inline Martingale add(const Martingale& a, const Martingale& b) {
  require_same_measure(a, b, "add");
  return Martingale(std::make_shared<nodes::Sum>(std::vector<NodePtr>{a.node(), b.node()}),
                    a.measure());
}

inline Martingale sum(const std::vector<Martingale>& terms) {
  if (terms.empty()) throw PreconditionError("sum of no martingales");
  std::vector<NodePtr> nodes;
  for (const auto& t : terms) {
    require_same_measure(terms.front(), t, "sum");
    nodes.push_back(t.node());
  }
  return Martingale(std::make_shared<nodes::Sum>(std::move(nodes)), terms.front().measure());
}

inline Martingale approx_only(const Martingale& d) {
  return Martingale(std::make_shared<nodes::ApproxOnly>(d.node()), d.measure());
}

/// First node where a martingale fails to be one.
struct Violation {
  BitString node;
  std::string message;
};

/// Checks d(w) >= 0 for |w| <= depth and the averaging identity
/// d(w)ν(w) = d(w0)ν(w0) + d(w1)ν(w1) for |w| < depth, in enumeration order.
inline std::optional<Violation> verify_martingale(const Martingale& d, std::uint32_t depth) {
  const ProbabilityMeasure& nu = d.measure();
  const Integer count = pow2(depth + 1) - 1;
  for (Integer i = 0; i < count; ++i) {
    const BitString w = ntob(i);
    const Rational dw = d.value(w);
    if (dw < 0) return Violation{w, "negative capital " + format_rational(dw) + " at " + w.str()};
    if (w.size() == depth) continue;
    const Rational lhs = dw * nu.mass_rational(w);
    const Rational rhs = d.value(w.with(0)) * nu.mass_rational(w.with(0)) +
                         d.value(w.with(1)) * nu.mass_rational(w.with(1));
    if (lhs != rhs) {
      return Violation{w, "averaging identity fails at " + w.str() + ": " + format_rational(lhs) +
                              " != " + format_rational(rhs)};
    }
  }
  return std::nullopt;
}

/// Validated table martingale.
inline Martingale table_martingale(std::vector<Dyadic> values, std::uint32_t depth,
                                   const ProbabilityMeasure& nu) {
  Martingale d = table_martingale_unchecked(std::move(values), depth, nu);
  if (auto bad = verify_martingale(d, depth)) throw PreconditionError(bad->message);
  return d;
}

/// True iff some prefix p of `prefix` has d(p) >= 1.
inline bool covers(const Martingale& d, const BitString& prefix) {
  for (std::size_t n = 0; n <= prefix.size(); ++n) {
    if (d.value(prefix.prefix(n)) >= 1) return true;
  }
  return false;
}

/// True iff no path of length <= depth drops below 1 after reaching 1.
inline bool is_regular(const Martingale& d, std::uint32_t depth) {
  struct Frame {
    BitString w;
    bool reached;
  };
  std::vector<Frame> stack{{BitString(), false}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const bool here = d.value(f.w) >= 1;
    if (f.reached && !here) return false;
    if (f.w.size() == depth) continue;
    stack.push_back({f.w.with(1), f.reached || here});
    stack.push_back({f.w.with(0), f.reached || here});
  }
  return true;
}

/// max_{p ⊑ prefix} d(p): finite-depth view of success.
inline Rational max_capital(const Martingale& d, const BitString& prefix) {
  Rational best = d.value(BitString());
  for (std::size_t n = 1; n <= prefix.size(); ++n) best = std::max(best, d.value(prefix.prefix(n)));
  return best;
}

/// min of d over the last `window` prefixes of `prefix`: finite-depth view of strong success.
inline Rational min_tail_capital(const Martingale& d, const BitString& prefix, std::size_t window) {
  const std::size_t n = prefix.size();
  const std::size_t from = window > n ? 0 : n - window;
  Rational least = d.value(prefix.prefix(n));
  for (std::size_t k = from; k < n; ++k) least = std::min(least, d.value(prefix.prefix(k)));
  return least;
}

/// Reads `martingale measure=SPEC depth=N` followed by `w mantissa precision`
/// lines. The measure comes from the header unless one is passed in.
inline Martingale parse_martingale(std::istream& in, const std::string& source,
                                   const std::optional<ProbabilityMeasure>& given) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::uint32_t> depth;
  std::optional<ProbabilityMeasure> nu = given;
  std::vector<std::optional<Dyadic>> cells;
  auto fail = [&](const std::string& what) {
    return ParseError(source + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (!depth) {
      if (first != "martingale") throw fail("expected header 'martingale measure=M depth=N'");
      std::string tok;
      while (fields >> tok) {
        if (tok.rfind("depth=", 0) == 0) {
          const Integer d = detail::parse_integer(tok.substr(6));
          if (d < 0 || d > 24) throw fail("depth out of range");
          depth = static_cast<std::uint32_t>(d);
        } else if (tok.rfind("measure=", 0) == 0) {
          if (!given) nu = load_measure(tok.substr(8));
        } else {
          throw fail("unknown header field '" + tok + "'");
        }
      }
      if (!depth) throw fail("header lacks depth=N");
      cells.assign((std::size_t{1} << (*depth + 1)) - 1, std::nullopt);
      continue;
    }
    std::string mant, prec, extra;
    if (!(fields >> mant >> prec) || (fields >> extra)) throw fail("expected 'w mantissa precision'");
    const BitString w(first);
    if (w.size() > *depth) throw fail("string " + w.str() + " deeper than table depth");
    const Integer p = detail::parse_integer(prec);
    if (p < 0 || p > 4096) throw fail("precision out of range");
    auto& cell = cells[static_cast<std::size_t>(bton(w))];
    if (cell) throw fail("duplicate entry for " + w.str());
    cell = Dyadic(detail::parse_integer(mant), static_cast<Precision>(p));
  }
  if (!depth) throw ParseError(source + ": empty martingale file");
  if (!nu) nu = ProbabilityMeasure::uniform();
  std::vector<Dyadic> values;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i]) throw ParseError(source + ": missing entry for " + ntob(Integer(i)).str());
    values.push_back(*cells[i]);
  }
  return table_martingale_unchecked(std::move(values), *depth, *nu);
}

/// Writes a table martingale of the given depth (values taken exactly; must be dyadic).
inline std::string format_martingale(const Martingale& d, std::uint32_t depth,
                                     const std::string& measure_spec) {
  std::ostringstream out;
  out << "martingale measure=" << measure_spec << " depth=" << depth << "\n";
  const Integer count = pow2(depth + 1) - 1;
  for (Integer i = 0; i < count; ++i) {
    const BitString w = ntob(i);
    const Rational v = d.value(w);
    auto dy = to_dyadic(v);
    if (!dy) throw PreconditionError("value " + format_rational(v) + " at " + w.str() + " is not dyadic");
    out << w << " " << dy->mantissa() << " " << dy->precision() << "\n";
  }
  return out.str();
}

}  // namespace rbm
