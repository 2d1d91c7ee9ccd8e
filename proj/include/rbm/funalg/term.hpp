#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rbm/core.hpp"

namespace rbm::funalg {

/// Ill-formed term: a closure rule or schema shape is violated.
class TermTypeError : public ParseError {
 public:
  explicit TermTypeError(const std::string& rule) : ParseError(rule), rule_(rule) {}
  TermTypeError(const std::string& rule, std::size_t position)
      : ParseError(rule, position), rule_(rule) {}
  const std::string& rule() const noexcept { return rule_; }

 private:
  std::string rule_;
};

/// (number of type-1 slots, number of type-0 slots).
struct Signature {
  std::size_t k = 0;
  std::size_t l = 0;
  friend bool operator==(const Signature&, const Signature&) = default;
};

enum class Kind { constant, s0, s1, succ, pred, smash, proj, pad, ap, oracle, comp, expand, lrn, br };

class Term;

struct TermNode {
  Kind kind;
  std::size_t a = 0;  // proj: j; pad: i; ap/oracle: slot; expand: k
  std::size_t b = 0;  // proj: n; expand: l
  std::vector<Term> kids;
  Signature sig;
};

class Term {
 public:
  explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}

  Kind kind() const noexcept { return node_->kind; }
  const Signature& signature() const noexcept { return node_->sig; }
  std::size_t k() const noexcept { return node_->sig.k; }
  std::size_t l() const noexcept { return node_->sig.l; }
  std::size_t a() const noexcept { return node_->a; }
  std::size_t b() const noexcept { return node_->b; }
  const std::vector<Term>& kids() const noexcept { return node_->kids; }
  const Term& kid(std::size_t i) const { return node_->kids.at(i); }

  /// Normal form: every composition explicit, every projection with its arity.
  std::string str() const;

  friend bool operator==(const Term& x, const Term& y) { return x.str() == y.str(); }

 private:
  std::shared_ptr<const TermNode> node_;
};

inline const char* kind_name(Kind kind) {
  switch (kind) {
    case Kind::constant: return "const";
    case Kind::s0: return "s0";
    case Kind::s1: return "s1";
    case Kind::succ: return "succ";
    case Kind::pred: return "pred";
    case Kind::smash: return "smash";
    case Kind::proj: return "proj";
    case Kind::pad: return "pad";
    case Kind::ap: return "ap";
    case Kind::oracle: return "oracle";
    case Kind::comp: return "comp";
    case Kind::expand: return "expand";
    case Kind::lrn: return "lrn";
    case Kind::br: return "br";
  }
  return "?";
}

inline std::string Term::str() const {
  const TermNode& n = *node_;
  std::string out = "(";
  out += kind_name(n.kind);
  switch (n.kind) {
    case Kind::proj:
      out += " " + std::to_string(n.a) + " " + std::to_string(n.b);
      break;
    case Kind::pad:
    case Kind::ap:
    case Kind::oracle:
      out += " " + std::to_string(n.a);
      break;
    case Kind::expand:
      out += " " + n.kids[0].str() + " " + std::to_string(n.a) + " " + std::to_string(n.b) + ")";
      return out;
    default:
      break;
  }
  for (const Term& t : n.kids) out += " " + t.str();
  return out + ")";
}

namespace detail {

inline Term make(Kind kind, Signature sig, std::size_t a = 0, std::size_t b = 0,
                 std::vector<Term> kids = {}) {
  return Term(std::make_shared<const TermNode>(TermNode{kind, a, b, std::move(kids), sig}));
}

inline std::string sig_str(const Signature& s) {
  return "(" + std::to_string(s.k) + ", " + std::to_string(s.l) + ")";
}

}  // namespace detail

inline Term constant() { return detail::make(Kind::constant, {0, 1}); }
inline Term s0() { return detail::make(Kind::s0, {0, 1}); }
inline Term s1() { return detail::make(Kind::s1, {0, 1}); }
inline Term succ() { return detail::make(Kind::succ, {0, 1}); }
inline Term pred() { return detail::make(Kind::pred, {0, 1}); }
inline Term smash() { return detail::make(Kind::smash, {0, 2}); }

inline Term proj(std::size_t j, std::size_t n) {
  if (j >= n) {
    throw TermTypeError("proj: index " + std::to_string(j) + " out of range for arity " +
                        std::to_string(n));
  }
  return detail::make(Kind::proj, {0, n}, j, n);
}

/// x ↦ 1^{g_i(|x|)}.
inline Term pad(std::size_t i) { return detail::make(Kind::pad, {0, 1}, i); }

/// Ap(f_j, x) = f_j(x).
inline Term ap(std::size_t j) { return detail::make(Kind::ap, {j + 1, 1}, j); }

/// The j-th function symbol of the extra oracle set X.
inline Term oracle(std::size_t j) { return detail::make(Kind::oracle, {0, 1}, j); }

/// H(f⃗, G_1(f⃗, x⃗), ..., G_l(f⃗, x⃗)); members with fewer type-1 slots ignore the rest.
inline Term comp(const Term& h, std::vector<Term> gs) {
  if (gs.empty()) throw TermTypeError("comp: needs at least one inner term");
  if (h.l() != gs.size()) {
    throw TermTypeError("comp: outer term takes " + std::to_string(h.l()) + " argument(s) but " +
                        std::to_string(gs.size()) + " inner term(s) were given");
  }
  std::size_t k = h.k();
  for (const Term& g : gs) {
    if (g.l() != gs.front().l()) {
      throw TermTypeError("comp: inner terms disagree on type-0 arity (" +
                          std::to_string(gs.front().l()) + " vs " + std::to_string(g.l()) + ")");
    }
    k = std::max(k, g.k());
  }
  const std::size_t l = gs.front().l();
  std::vector<Term> kids{h};
  kids.insert(kids.end(), gs.begin(), gs.end());
  return detail::make(Kind::comp, {k, l}, 0, 0, std::move(kids));
}

/// F(f⃗, g⃗, x⃗, y⃗) = G(f⃗, x⃗) with signature (k, l).
inline Term expand(const Term& g, std::size_t k, std::size_t l) {
  if (k < g.k() || l < g.l()) {
    throw TermTypeError("expand: target " + detail::sig_str({k, l}) + " is smaller than " +
                        detail::sig_str(g.signature()));
  }
  return detail::make(Kind::expand, {k, l}, k, l, {g});
}

namespace detail {

inline Signature recursion_signature(const char* schema, const Term& g, const Term& h,
                                     const Term& kb) {
  const std::size_t n = g.l();
  if (h.l() != n + 2) {
    throw TermTypeError(std::string(schema) + ": step term must take " + std::to_string(n + 2) +
                        " arguments (x⃗, w, previous), got " + std::to_string(h.l()));
  }
  if (kb.l() != n + 1) {
    throw TermTypeError(std::string(schema) + ": bound term must take " + std::to_string(n + 1) +
                        " arguments (x⃗, w), got " + std::to_string(kb.l()));
  }
  return {std::max({g.k(), h.k(), kb.k()}), n + 1};
}

}  // namespace detail

/// Limited recursion on notation: F(x⃗, λ) = G(x⃗), F(x⃗, wb) = H(x⃗, wb, F(x⃗, w)),
/// with |F(x⃗, w)| <= |K(x⃗, w)|.
inline Term lrn(const Term& g, const Term& h, const Term& kb) {
  return detail::make(Kind::lrn, detail::recursion_signature("lrn", g, h, kb), 0, 0, {g, h, kb});
}

/// Bounded recursion: F(x⃗, 0) = G(x⃗), F(x⃗, n+1) = H(x⃗, n, F(x⃗, n)), with F <= K.
inline Term br(const Term& g, const Term& h, const Term& kb) {
  return detail::make(Kind::br, detail::recursion_signature("br", g, h, kb), 0, 0, {g, h, kb});
}

namespace detail {

inline std::size_t small_number(const SExpr& e, const char* what) {
  if (e.is_list) throw TermTypeError(std::string(what) + " must be a number", e.position);
  const Integer v = rbm::detail::parse_integer(e.atom);
  if (v < 0 || v > 4096) {
    throw TermTypeError(std::string(what) + " out of range: " + e.atom, e.position);
  }
  return static_cast<std::size_t>(v);
}

inline Term build_term(const SExpr& e) {
  if (!e.is_list || e.items.empty() || e.items[0].is_list) {
    throw ParseError("term must be a list headed by a symbol, got " + e.str(), e.position);
  }
  const std::string& head = e.items[0].atom;
  std::vector<const SExpr*> params;
  std::vector<Term> args;
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    // Numbers may precede or follow the subterms, as in (proj 0 2) and (expand G 1 2).
    if (e.items[i].is_list) args.push_back(build_term(e.items[i]));
    else params.push_back(&e.items[i]);
  }
  auto want_params = [&](std::size_t lo, std::size_t hi) {
    if (params.size() < lo || params.size() > hi) {
      throw TermTypeError(head + ": wrong number of numeric parameters", e.position);
    }
  };
  try {
    if (head == "comp") {
      want_params(0, 0);
      if (args.size() < 2) throw TermTypeError("comp: needs an outer and at least one inner term");
      return comp(args[0], std::vector<Term>(args.begin() + 1, args.end()));
    }
    if (head == "expand") {
      want_params(2, 2);
      if (args.size() != 1) throw TermTypeError("expand: needs exactly one term");
      return expand(args[0], small_number(*params[0], "expand k"), small_number(*params[1], "expand l"));
    }
    if (head == "lrn" || head == "br") {
      want_params(0, 0);
      if (args.size() != 3) throw TermTypeError(head + ": needs exactly three terms (G H K)");
      return head == "lrn" ? lrn(args[0], args[1], args[2]) : br(args[0], args[1], args[2]);
    }
    Term f = [&]() -> Term {
      if (head == "const") return want_params(0, 0), constant();
      if (head == "s0") return want_params(0, 0), s0();
      if (head == "s1") return want_params(0, 0), s1();
      if (head == "succ") return want_params(0, 0), succ();
      if (head == "pred") return want_params(0, 0), pred();
      if (head == "smash") return want_params(0, 0), smash();
      if (head == "proj") {
        want_params(1, 2);
        const std::size_t j = small_number(*params[0], "proj index");
        return proj(j, params.size() == 2 ? small_number(*params[1], "proj arity") : j + 1);
      }
      if (head == "pad") return want_params(1, 1), pad(small_number(*params[0], "pad level"));
      if (head == "ap") return want_params(1, 1), ap(small_number(*params[0], "ap slot"));
      if (head == "oracle") return want_params(1, 1), oracle(small_number(*params[0], "oracle index"));
      throw ParseError("unknown term constructor '" + head + "'", e.position);
    }();
    // (f E1 ... En) abbreviates (comp (f) E1 ... En).
    if (args.empty()) return f;
    return comp(f, std::move(args));
  } catch (const TermTypeError& err) {
    if (err.position() != std::string::npos) throw;
    throw TermTypeError(err.rule(), e.position);
  }
}

}  // namespace detail

inline Term parse_term(std::string_view text) { return detail::build_term(parse_sexpr(text)); }

}  // namespace rbm::funalg
