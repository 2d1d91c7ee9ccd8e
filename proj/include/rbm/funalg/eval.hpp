#pragma once

#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rbm/funalg/term.hpp"

namespace rbm::funalg {

/// A total string function with its exact length function |f|(n) = max_{|w|<=n} |f(w)|.
class Oracle {
 public:
  using Fn = std::function<BitString(const BitString&)>;
  using Length = std::function<Integer(const Integer&)>;

  Oracle(std::string name, Fn fn, Length length)
      : name_(std::move(name)), fn_(std::move(fn)), length_(std::move(length)) {}

  BitString operator()(const BitString& x) const { return fn_(x); }
  Integer length(const Integer& n) const { return length_(n); }
  const std::string& name() const noexcept { return name_; }

  /// Table with a default answer for every string not listed.
  static Oracle table(std::map<BitString, BitString> entries, BitString fallback,
                      std::string name = "table") {
    auto shared = std::make_shared<const std::pair<std::map<BitString, BitString>, BitString>>(
        std::move(entries), std::move(fallback));
    auto fn = [shared](const BitString& x) {
      auto it = shared->first.find(x);
      return it == shared->first.end() ? shared->second : it->second;
    };
    auto length = [shared](const Integer& n) {
      Integer best = 0;
      Integer listed = 0;
      for (const auto& [q, a] : shared->first) {
        if (Integer(q.size()) <= n) {
          ++listed;
          best = std::max(best, Integer(a.size()));
        }
      }
      // The default is reached unless the table lists every string of length <= n.
      if (n >= 62 || listed < pow2(static_cast<unsigned>(n) + 1) - 1) {
        best = std::max(best, Integer(shared->second.size()));
      }
      return best;
    };
    return Oracle(std::move(name), std::move(fn), std::move(length));
  }

  /// identity, empty (constant λ), double (w ↦ ww), ones (w ↦ 1^{|w|+1}).
  static Oracle builtin(const std::string& name) {
    if (name == "identity") {
      return Oracle(name, [](const BitString& x) { return x; }, [](const Integer& n) { return n; });
    }
    if (name == "empty") {
      return Oracle(name, [](const BitString&) { return BitString(); },
                    [](const Integer&) { return Integer(0); });
    }
    if (name == "double") {
      return Oracle(name, [](const BitString& x) { return x + x; },
                    [](const Integer& n) { return Integer(2 * n); });
    }
    if (name == "ones") {
      return Oracle(name, [](const BitString& x) { return BitString::ones(x.size() + 1); },
                    [](const Integer& n) { return Integer(n + 1); });
    }
    throw PreconditionError("unknown builtin oracle '" + name + "'");
  }

 private:
  std::string name_;
  Fn fn_;
  Length length_;
};

/// Oracle file: lines `query answer`, last line `default answer`; `#` comments.
inline Oracle parse_oracle(std::istream& in, const std::string& source) {
  std::map<BitString, BitString> entries;
  std::optional<BitString> fallback;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string q, a, extra;
    if (!(fields >> q)) continue;
    auto fail = [&](const std::string& what) {
      return ParseError(source + ":" + std::to_string(lineno) + ": " + what);
    };
    if (fallback) throw fail("entries after the default line");
    if (!(fields >> a) || (fields >> extra)) throw fail("expected `query answer`");
    try {
      if (q == "default") {
        fallback = BitString(a);
      } else if (!entries.emplace(BitString(q), BitString(a)).second) {
        throw fail("duplicate query " + q);
      }
    } catch (const ParseError& err) {
      if (std::string(err.what()).rfind(source, 0) == 0) throw;
      throw fail(err.what());
    }
  }
  if (!fallback) throw ParseError(source + ": missing `default answer` line");
  return Oracle::table(std::move(entries), *fallback, source);
}

/// A builtin name or a path to an oracle file.
inline Oracle load_oracle(const std::string& spec) {
  for (const char* name : {"identity", "empty", "double", "ones"}) {
    if (spec == name) return Oracle::builtin(spec);
  }
  std::ifstream in(spec);
  if (!in) throw PreconditionError("cannot open oracle file " + spec);
  return parse_oracle(in, spec);
}

struct Query {
  bool symbol;  // true for X-oracle symbols, false for type-1 arguments
  std::size_t slot;
  BitString question;
  std::size_t answer_length;
};

/// Cost surrogate: one step per node, plus the output length of initial
/// functions, plus the answer length of every query.
struct Meter {
  std::uint64_t steps = 0;
  std::size_t max_length = 0;
  std::vector<Query> queries;
  std::optional<std::uint64_t> step_limit;

  void see(const BitString& s) { max_length = std::max(max_length, s.size()); }
  void charge(std::uint64_t n) {
    steps += n;
    if (step_limit && steps > *step_limit) {
      throw ResourceError("evaluation exceeded the step limit of " + std::to_string(*step_limit));
    }
  }
  std::string str() const {
    return "steps=" + std::to_string(steps) + " max_length=" + std::to_string(max_length) +
           " queries=" + std::to_string(queries.size());
  }
  friend bool operator==(const Meter& a, const Meter& b) {
    if (a.steps != b.steps || a.max_length != b.max_length || a.queries.size() != b.queries.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.queries.size(); ++i) {
      const Query& x = a.queries[i];
      const Query& y = b.queries[i];
      if (x.symbol != y.symbol || x.slot != y.slot || x.question != y.question ||
          x.answer_length != y.answer_length) {
        return false;
      }
    }
    return true;
  }
};

namespace detail {

class Evaluator {
 public:
  Evaluator(std::span<const Oracle> symbols, Meter& meter) : symbols_(symbols), meter_(meter) {}

  BitString run(const Term& t, std::span<const Oracle> f, std::span<const BitString> x) {
    meter_.charge(1);
    BitString out = step(t, f, x);
    meter_.see(out);
    return out;
  }

 private:
  BitString initial(BitString value) {
    meter_.charge(value.size());
    return value;
  }

  BitString ask(const Oracle& o, bool symbol, std::size_t slot, const BitString& q) {
    BitString answer = o(q);
    check_magnitude(answer.size(), "oracle answer length");
    meter_.queries.push_back({symbol, slot, q, answer.size()});
    meter_.charge(answer.size());
    return answer;
  }

  BitString step(const Term& t, std::span<const Oracle> f, std::span<const BitString> x) {
    switch (t.kind()) {
      case Kind::constant: return initial(BitString());
      case Kind::s0: return initial(x[0].with(0));
      case Kind::s1: return initial(x[0].with(1));
      case Kind::succ: return initial(successor(x[0]));
      case Kind::pred: return initial(predecessor(x[0]));
      case Kind::smash: return initial(rbm::smash(x[0], x[1]));
      case Kind::proj: return x[t.a()];
      case Kind::pad: {
        const Integer n = growth(static_cast<unsigned>(t.a()), Integer(x[0].size()));
        check_magnitude(static_cast<std::uint64_t>(std::min<Integer>(n, Integer(1) << 62)),
                        "pad output length");
        return initial(BitString::ones(static_cast<std::size_t>(n)));
      }
      case Kind::ap: return ask(f[t.a()], false, t.a(), x[0]);
      case Kind::oracle: {
        if (t.a() >= symbols_.size()) {
          throw PreconditionError("oracle symbol " + std::to_string(t.a()) + " is not bound (" +
                                  std::to_string(symbols_.size()) + " supplied)");
        }
        return ask(symbols_[t.a()], true, t.a(), x[0]);
      }
      case Kind::comp: {
        std::vector<BitString> inner;
        inner.reserve(t.kids().size() - 1);
        for (std::size_t i = 1; i < t.kids().size(); ++i) inner.push_back(run(t.kid(i), f, x));
        return run(t.kid(0), f, inner);
      }
      case Kind::expand: return run(t.kid(0), f, x.first(t.kid(0).l()));
      case Kind::lrn: return recurse_on_notation(t, f, x);
      case Kind::br: return bounded_recursion(t, f, x);
    }
    throw PreconditionError("unknown term kind");
  }

  // F(x⃗, wb) = H(x⃗, wb, F(x⃗, w)); peels the last bit of the recursion argument.
  BitString recurse_on_notation(const Term& t, std::span<const Oracle> f,
                                std::span<const BitString> x) {
    const std::size_t n = t.l() - 1;
    const BitString& w = x[n];
    std::vector<BitString> args(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    BitString value = run(t.kid(0), f, args);
    args.push_back(BitString());
    for (std::size_t i = 0;; ++i) {
      args[n] = w.prefix(i);
      const BitString bound = run(t.kid(2), f, args);
      if (value.size() > bound.size()) {
        throw BoundViolation("lrn: |F| = " + std::to_string(value.size()) + " exceeds |K| = " +
                             std::to_string(bound.size()) + " at step " + std::to_string(i) +
                             " (w = " + args[n].str() + ") in " + t.str());
      }
      if (i == w.size()) return value;
      args[n] = w.prefix(i + 1);
      args.push_back(value);
      value = run(t.kid(1), f, args);
      args.pop_back();
    }
  }

  // F(x⃗, m+1) = H(x⃗, m, F(x⃗, m)), counting m through the standard enumeration.
  BitString bounded_recursion(const Term& t, std::span<const Oracle> f,
                              std::span<const BitString> x) {
    const std::size_t n = t.l() - 1;
    const BitString& target = x[n];
    const Integer count = bton(target);
    if (count > magnitude_cap()) {
      throw ResourceError("br: " + count.str() + " iterations exceed the magnitude cap " +
                          std::to_string(magnitude_cap()));
    }
    std::vector<BitString> args(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    BitString value = run(t.kid(0), f, args);
    args.push_back(BitString());
    for (Integer i = 0;; ++i) {
      const BitString bound = run(t.kid(2), f, args);
      if (bound < value) {
        throw BoundViolation("br: F = " + value.str() + " exceeds K = " + bound.str() +
                             " at step " + i.str() + " in " + t.str());
      }
      if (i == count) return value;
      args.push_back(value);
      value = run(t.kid(1), f, args);
      args.pop_back();
      args[n] = successor(args[n]);
    }
  }

  std::span<const Oracle> symbols_;
  Meter& meter_;
};

}  // namespace detail

/// Evaluates t on type-1 arguments f⃗ and type-0 arguments x⃗. `symbols` binds
/// the extra oracle set X.
inline BitString evaluate(const Term& t, std::span<const Oracle> f, std::span<const BitString> x,
                          Meter* meter = nullptr, std::span<const Oracle> symbols = {}) {
  if (f.size() < t.k()) {
    throw PreconditionError("term " + t.str() + " needs " + std::to_string(t.k()) +
                            " function argument(s), got " + std::to_string(f.size()));
  }
  if (x.size() != t.l()) {
    throw PreconditionError("term " + t.str() + " takes " + std::to_string(t.l()) +
                            " string argument(s), got " + std::to_string(x.size()));
  }
  Meter local;
  Meter& m = meter ? *meter : local;
  for (const BitString& s : x) m.see(s);
  return detail::Evaluator(symbols, m).run(t, f, x);
}

inline BitString evaluate(const Term& t, const std::vector<Oracle>& f,
                          const std::vector<BitString>& x, Meter* meter = nullptr,
                          const std::vector<Oracle>& symbols = {}) {
  return evaluate(t, std::span<const Oracle>(f), std::span<const BitString>(x), meter,
                  std::span<const Oracle>(symbols));
}

}  // namespace rbm::funalg
