#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rbm/funalg/eval.hpp"
#include "rbm/funalg/secpoly.hpp"

namespace rbm::funalg {

/// time: steps and max intermediate length are both bounded by P; space: only the length.
enum class BoundKind { time, space };

inline BoundKind parse_bound_kind(const std::string& s) {
  if (s == "time") return BoundKind::time;
  if (s == "space") return BoundKind::space;
  throw ParseError("bound kind must be time or space, got '" + s + "'");
}

struct BoundReport {
  BoundKind kind = BoundKind::time;
  Integer bound = 0;
  Meter meter;
  std::optional<BitString> value;
  std::string violation;  // empty when within bound

  bool within() const { return violation.empty(); }

  std::string str() const {
    std::string out = within() ? "within" : "violated";
    out += " kind=" + std::string(kind == BoundKind::time ? "time" : "space");
    out += " bound=" + bound.str() + " " + meter.str();
    if (!within()) out += "\n" + violation;
    return out;
  }
};

/// Evaluates t with metering and compares the meter against P(|f_1|, ..., |x_1|, ...).
/// Schema bound violations inside t are reported, not thrown.
inline BoundReport check_bound(const Term& t, const SecPoly& p, const std::vector<Oracle>& oracles,
                               const std::vector<BitString>& args, BoundKind kind = BoundKind::time,
                               const std::vector<Oracle>& symbols = {}) {
  BoundReport report;
  report.kind = kind;
  std::vector<SecPoly::LengthFn> lengths;
  for (const Oracle& f : oracles) {
    lengths.push_back([f](const Integer& n) { return f.length(n); });
  }
  std::vector<Integer> nvals;
  for (const BitString& x : args) nvals.emplace_back(x.size());
  report.bound = p.eval(lengths, nvals);
  try {
    report.value = evaluate(t, oracles, args, &report.meter, symbols);
  } catch (const BoundViolation& err) {
    report.violation = err.what();
    return report;
  }
  if (kind == BoundKind::time && Integer(report.meter.steps) > report.bound) {
    report.violation = "step count " + std::to_string(report.meter.steps) + " exceeds " +
                       report.bound.str();
  } else if (Integer(report.meter.max_length) > report.bound) {
    report.violation = "max length " + std::to_string(report.meter.max_length) + " exceeds " +
                       report.bound.str();
  }
  return report;
}

/// A declared bound: `kind`, `term` and `poly` lines; `#` comments.
struct BoundSpec {
  BoundKind kind = BoundKind::time;
  Term term;
  SecPoly poly;
};

inline BoundSpec parse_bound_spec(std::istream& in, const std::string& source) {
  std::optional<BoundKind> kind;
  std::optional<Term> term;
  std::optional<SecPoly> poly;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key)) continue;
    std::string rest;
    std::getline(fields, rest);
    if (key == "kind") {
      std::istringstream r(rest);
      std::string k;
      r >> k;
      kind = parse_bound_kind(k);
    } else if (key == "term") {
      term = parse_term(rest);
    } else if (key == "poly") {
      poly = parse_secpoly(rest);
    } else {
      throw ParseError(source + ": unknown key '" + key + "'");
    }
  }
  if (!term || !poly) throw ParseError(source + ": needs `term` and `poly` lines");
  return BoundSpec{kind.value_or(BoundKind::time), *term, *poly};
}

inline BoundSpec load_bound_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open bound file " + path);
  return parse_bound_spec(in, path);
}

/// Syntactic membership in BFF(X), BFF_i(X) or BFSF_i(X).
class Algebra {
 public:
  enum class Base { bff, bff_i, bfsf_i };

  static Algebra bff(std::size_t extra_oracles = 0) { return Algebra(Base::bff, 0, extra_oracles); }
  static Algebra bff_i(std::size_t i, std::size_t extra_oracles = 0) {
    return Algebra(Base::bff_i, i, extra_oracles);
  }
  static Algebra bfsf_i(std::size_t i, std::size_t extra_oracles = 0) {
    return Algebra(Base::bfsf_i, i, extra_oracles);
  }

  /// "bff", "bff_i:2", "bfsf_i:1".
  static Algebra parse(const std::string& spec, std::size_t extra_oracles = 0) {
    if (spec == "bff") return bff(extra_oracles);
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    if (colon == std::string::npos || (head != "bff_i" && head != "bfsf_i")) {
      throw ParseError("algebra must be bff, bff_i:<i> or bfsf_i:<i>, got '" + spec + "'");
    }
    const Integer i = rbm::detail::parse_integer(spec.substr(colon + 1));
    if (i < 0 || i > 64) throw ParseError("algebra level out of range: " + spec);
    const auto level = static_cast<std::size_t>(i);
    return head == "bff_i" ? bff_i(level, extra_oracles) : bfsf_i(level, extra_oracles);
  }

  std::string name() const {
    switch (base_) {
      case Base::bff: return "bff";
      case Base::bff_i: return "bff_i:" + std::to_string(level_);
      case Base::bfsf_i: return "bfsf_i:" + std::to_string(level_);
    }
    return "?";
  }

  /// The first disallowed node in pre-order, with the reason; nullopt when t is a member.
  std::optional<std::string> reject(const Term& t) const { return walk(t, false); }
  bool accepts(const Term& t) const { return !reject(t); }

 private:
  Algebra(Base base, std::size_t level, std::size_t extra)
      : base_(base), level_(level), extra_(extra) {}

  // A subtree with no ap/oracle node denotes a type-1 Cobham function.
  static bool first_order(const Term& t) {
    if (t.kind() == Kind::ap || t.kind() == Kind::oracle) return false;
    for (const Term& c : t.kids()) {
      if (!first_order(c)) return false;
    }
    return true;
  }

  std::optional<std::string> walk(const Term& t, bool in_cobham) const {
    auto no = [&](const std::string& why) {
      return std::optional<std::string>(t.str() + ": " + why + " in " + name());
    };
    switch (t.kind()) {
      case Kind::pad: {
        const std::size_t top = base_ == Base::bff ? 0 : level_;
        if (t.a() > top) return no("pad(" + std::to_string(t.a()) + ") exceeds level " + std::to_string(top));
        break;
      }
      case Kind::oracle:
        if (t.a() >= extra_) {
          return no("oracle symbol " + std::to_string(t.a()) + " not among " + std::to_string(extra_) +
                    " extra oracle(s)");
        }
        break;
      case Kind::br:
        if (base_ != Base::bfsf_i) return no("bounded recursion is a space schema");
        break;
      case Kind::lrn:
        if (base_ == Base::bfsf_i && !in_cobham) {
          if (!first_order(t)) return no("recursion on notation only builds type-1 polynomial-time functions");
          in_cobham = true;
        }
        break;
      default: break;
    }
    for (const Term& c : t.kids()) {
      if (auto why = walk(c, in_cobham)) return why;
    }
    return std::nullopt;
  }

  Base base_;
  std::size_t level_;
  std::size_t extra_;
};

}  // namespace rbm::funalg
