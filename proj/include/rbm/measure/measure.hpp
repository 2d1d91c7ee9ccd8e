#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rbm/core.hpp"

namespace rbm {

/// Linear weak-positivity witness l(n) = c0 + c1 n.
struct Witness {
  std::uint64_t c0 = 0;
  std::uint64_t c1 = 0;

  std::uint64_t operator()(std::uint64_t n) const { return c0 + c1 * n; }
  friend bool operator==(const Witness&, const Witness&) = default;
};

/// How a table measure continues below its last tabulated level.
enum class Extension {
  half,  ///< every further bit splits the mass evenly
  copy,  ///< every further bit reuses the last tabulated split along the path
};

inline const char* to_string(Extension e) { return e == Extension::half ? "half" : "copy"; }

/// Smallest k with 2^-k <= x, for a dyadic 0 < x <= 1.
inline std::uint64_t neg_log2_ceil(const Dyadic& x) {
  const std::uint64_t top = floor_log2(x.mantissa());
  return x.precision() - top;
}

/// A probability measure on Cantor space: exact dyadic masses tabulated to
/// depth N plus an extension rule, with a linear weak-positivity witness.
///
/// Copies share the underlying table.
class ProbabilityMeasure {
 public:
  /// Validates the table (root mass 1, additivity, range, dyadic extension
  /// conditionals). The witness is derived when not supplied and checked when it is.
  ProbabilityMeasure(std::vector<Dyadic> table, std::uint32_t depth, Extension ext,
                     std::optional<Witness> witness = std::nullopt, std::string name = "table")
      : impl_(std::make_shared<Impl>()) {
    impl_->table = std::move(table);
    impl_->depth = depth;
    impl_->ext = ext;
    impl_->name = std::move(name);
    validate();
    const Witness needed = derive_witness();
    if (witness) {
      check_witness(*witness, needed);
      impl_->witness = *witness;
    } else {
      impl_->witness = needed;
    }
  }

  static ProbabilityMeasure uniform() {
    return ProbabilityMeasure({Dyadic(1)}, 0, Extension::half, Witness{0, 1}, "uniform");
  }

  /// Every bit is 1 with probability p, independently.
  static ProbabilityMeasure biased(const Dyadic& p) {
    if (p <= Dyadic(0) || p >= Dyadic(1)) {
      throw DomainError("biased: p = " + p.str() + " is not in (0,1)");
    }
    return ProbabilityMeasure({Dyadic(1), Dyadic(1) - p, p}, 1, Extension::copy, std::nullopt,
                              "biased:" + p.str());
  }

  std::uint32_t depth() const noexcept { return impl_->depth; }
  Extension extension() const noexcept { return impl_->ext; }
  const Witness& witness() const noexcept { return impl_->witness; }
  const std::string& name() const noexcept { return impl_->name; }
  const std::vector<Dyadic>& table() const noexcept { return impl_->table; }

  /// Exact mass ν(w).
  Dyadic mass(const BitString& w) const {
    const auto n = w.size();
    if (n <= depth()) return impl_->table[index(w)];
    const BitString top = w.prefix(depth());
    Dyadic m = impl_->table[index(top)];
    if (m.is_zero()) return m;
    if (impl_->ext == Extension::half || depth() == 0) {
      return m.scaled(-static_cast<long long>(n - depth()));
    }
    const BitString parent = top.parent();
    const Dyadic& pm = impl_->table[index(parent)];
    const Dyadic c[2] = {split(parent, 0, pm), split(parent, 1, pm)};
    for (std::size_t i = depth(); i < n; ++i) m *= c[w[i]];
    return m;
  }

  Rational mass_rational(const BitString& w) const { return mass(w).to_rational(); }

  /// ν(w | v) = ν(w)/ν(v); requires ν(v) > 0.
  Rational conditional(const BitString& w, const BitString& v) const {
    const Dyadic mv = mass(v);
    if (mv.is_zero()) throw PreconditionError("conditional on null string " + v.str());
    return mass_rational(w) / mv.to_rational();
  }

  /// Weak positivity: ν(w) = 0 or ν(w) >= 2^-l(|w|).
  bool weakly_positive_at(const BitString& w) const {
    const Dyadic m = mass(w);
    return m.is_zero() || m >= Dyadic::unit_fraction(static_cast<Precision>(witness()(w.size())));
  }

  friend bool operator==(const ProbabilityMeasure& a, const ProbabilityMeasure& b) {
    if (a.impl_ == b.impl_) return true;
    return a.impl_->depth == b.impl_->depth && a.impl_->ext == b.impl_->ext &&
           a.impl_->table == b.impl_->table;
  }

  /// Serializes in the measure file format.
  std::string str() const {
    std::ostringstream out;
    out << "measure depth=" << depth() << " ext=" << to_string(extension()) << "\n";
    for (std::size_t i = 0; i < impl_->table.size(); ++i) {
      const Dyadic& m = impl_->table[i];
      out << ntob(Integer(i)).str() << " " << m.mantissa() << " " << m.precision() << "\n";
    }
    out << "l poly " << witness().c0 << " " << witness().c1 << "\n";
    return out.str();
  }

 private:
  struct Impl {
    std::vector<Dyadic> table;
    std::uint32_t depth = 0;
    Extension ext = Extension::half;
    Witness witness;
    std::string name;
  };

  static std::size_t index(const BitString& w) {
    return static_cast<std::size_t>(bton(w));
  }

  /// ν(ub | u) for the tabulated u; pm = ν(u) > 0.
  Dyadic split(const BitString& u, int b, const Dyadic& pm) const {
    const Rational c = impl_->table[index(u.with(b))].to_rational() / pm.to_rational();
    return *to_dyadic(c);  // validated at construction
  }

  void validate() const {
    const std::size_t expected = (std::size_t{1} << (impl_->depth + 1)) - 1;
    if (impl_->depth > 24) throw ResourceError("measure table depth " + std::to_string(impl_->depth) + " too large");
    if (impl_->table.size() != expected) {
      throw PreconditionError("measure table has " + std::to_string(impl_->table.size()) +
                              " entries, depth " + std::to_string(impl_->depth) + " needs " +
                              std::to_string(expected));
    }
    if (impl_->table[0] != Dyadic(1)) {
      throw PreconditionError("measure: mass of ~ is " + impl_->table[0].str() + ", not 1");
    }
    for (std::size_t i = 0; i < expected; ++i) {
      const Dyadic& m = impl_->table[i];
      const BitString w = ntob(Integer(i));
      if (m.sign() < 0 || m > Dyadic(1)) {
        throw PreconditionError("measure: mass of " + w.str() + " is " + m.str() + ", outside [0,1]");
      }
      if (w.size() < impl_->depth) {
        const Dyadic sum = impl_->table[index(w.with(0))] + impl_->table[index(w.with(1))];
        if (sum != m) {
          throw PreconditionError("measure: additivity fails at " + w.str() + ": " + m.str() +
                                  " != " + sum.str());
        }
      }
    }
    if (impl_->ext == Extension::copy && impl_->depth > 0) {
      for (std::size_t i = 0; i < expected; ++i) {
        const BitString u = ntob(Integer(i));
        if (u.size() + 1 != impl_->depth) continue;
        const Dyadic& pm = impl_->table[i];
        if (pm.is_zero()) continue;
        for (int b = 0; b < 2; ++b) {
          const Rational c = impl_->table[index(u.with(b))].to_rational() / pm.to_rational();
          if (!is_dyadic(c)) {
            throw PreconditionError("measure: copy extension needs a dyadic split at " + u.str() +
                                    ", got " + format_rational(c));
          }
        }
      }
    }
  }

  /// The least linear witness consistent with the table and extension rule.
  Witness derive_witness() const {
    std::uint64_t c1 = 1;
    const std::size_t n = impl_->table.size();
    if (impl_->ext == Extension::copy && impl_->depth > 0) {
      c1 = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const BitString u = ntob(Integer(i));
        if (u.size() + 1 != impl_->depth || impl_->table[i].is_zero()) continue;
        for (int b = 0; b < 2; ++b) {
          const Dyadic c = split(u, b, impl_->table[i]);
          if (!c.is_zero()) c1 = std::max(c1, neg_log2_ceil(c));
        }
      }
    }
    std::uint64_t c0 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Dyadic& m = impl_->table[i];
      if (m.is_zero()) continue;
      const std::uint64_t need = neg_log2_ceil(m);
      const std::uint64_t len = ntob(Integer(i)).size();
      if (need > c1 * len) c0 = std::max(c0, need - c1 * len);
    }
    return Witness{c0, c1};
  }

  /// A supplied witness must bound every tabulated mass and grow at least as
  /// fast as the extension rule demands.
  void check_witness(const Witness& given, const Witness& needed) const {
    auto reject = [&](const std::string& why) {
      throw PreconditionError("measure: witness l(n) = " + std::to_string(given.c0) + " + " +
                              std::to_string(given.c1) + "n is too small: " + why);
    };
    if (given.c1 < needed.c1) reject("slope below " + std::to_string(needed.c1));
    for (std::size_t i = 0; i < impl_->table.size(); ++i) {
      const Dyadic& m = impl_->table[i];
      if (m.is_zero()) continue;
      const BitString w = ntob(Integer(i));
      if (given(w.size()) < neg_log2_ceil(m)) reject("mass of " + w.str() + " is " + m.str());
    }
  }

  std::shared_ptr<Impl> impl_;
};

/// Conditional functional B(ν, l)(w, v): ν(w|v) when v ⊑ w, 1 when w ⊑ v,
/// 0 otherwise; the first two cases also need ν(w) >= 2^-l(|w|).
inline Rational conditional_b(const ProbabilityMeasure& nu, const Witness& l, const BitString& w,
                              const BitString& v) {
  const Dyadic mw = nu.mass(w);
  const bool heavy =
      !mw.is_zero() && mw >= Dyadic::unit_fraction(static_cast<Precision>(l(w.size())));
  if (!heavy) return 0;
  if (v.is_prefix_of(w)) return mw.to_rational() / nu.mass(v).to_rational();
  if (w.is_prefix_of(v)) return 1;
  return 0;
}

inline Rational conditional_b(const ProbabilityMeasure& nu, const BitString& w, const BitString& v) {
  return conditional_b(nu, nu.witness(), w, v);
}

/// Reads the measure file format.
inline ProbabilityMeasure parse_measure(std::istream& in, const std::string& source = "measure") {
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::uint32_t> depth;
  Extension ext = Extension::half;
  std::optional<Witness> witness;
  std::vector<std::optional<Dyadic>> cells;
  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError(source + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (!depth) {
      if (first != "measure") throw fail("expected header 'measure depth=N ext=half|copy'");
      std::string tok;
      while (fields >> tok) {
        if (tok.rfind("depth=", 0) == 0) {
          const Integer d = detail::parse_integer(tok.substr(6));
          if (d < 0 || d > 24) throw fail("depth out of range");
          depth = static_cast<std::uint32_t>(d);
        } else if (tok == "ext=half") {
          ext = Extension::half;
        } else if (tok == "ext=copy") {
          ext = Extension::copy;
        } else {
          throw fail("unknown header field '" + tok + "'");
        }
      }
      if (!depth) throw fail("header lacks depth=N");
      cells.assign((std::size_t{1} << (*depth + 1)) - 1, std::nullopt);
      continue;
    }
    if (first == "l") {
      std::string kind, c0, c1, extra;
      if (!(fields >> kind >> c0 >> c1) || kind != "poly" || (fields >> extra)) {
        throw fail("expected 'l poly c0 c1'");
      }
      witness = Witness{static_cast<std::uint64_t>(detail::parse_integer(c0)),
                        static_cast<std::uint64_t>(detail::parse_integer(c1))};
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
  if (!depth) throw ParseError(source + ": empty measure file");
  std::vector<Dyadic> table;
  table.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i]) throw ParseError(source + ": missing entry for " + ntob(Integer(i)).str());
    table.push_back(*cells[i]);
  }
  return ProbabilityMeasure(std::move(table), *depth, ext, witness, source);
}

/// `uniform`, `biased:p` (p dyadic, e.g. `biased:1/4`), or a path to a measure file.
inline ProbabilityMeasure load_measure(const std::string& spec) {
  if (spec == "uniform") return ProbabilityMeasure::uniform();
  if (spec.rfind("biased:", 0) == 0) return ProbabilityMeasure::biased(parse_dyadic(spec.substr(7)));
  std::ifstream in(spec);
  if (!in) throw PreconditionError("cannot open measure file '" + spec + "'");
  return parse_measure(in, spec);
}

}  // namespace rbm
