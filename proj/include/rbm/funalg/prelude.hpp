#pragma once

#include <string>

#include "rbm/funalg/eval.hpp"

namespace rbm::funalg::prelude {

/// x ↦ 1.
inline Term one() { return parse_term("(comp (s1) (const))"); }

/// x ↦ 1^{|x|}.
inline Term unary() { return comp(smash(), {proj(0, 1), one()}); }

/// (x, w) ↦ 0^{|w|}.
inline Term zeros_by() { return parse_term("(lrn (const) (comp (s0) (proj 2 3)) (proj 1 2))"); }

/// x ↦ 0^{|x|}.
inline Term zeros() { return comp(zeros_by(), {proj(0, 1), proj(0, 1)}); }

/// x ↦ 1^{|x|-1} (λ for |x| <= 1), since pred(0^k) = 1^{k-1}.
inline Term shorten() { return comp(pred(), {zeros()}); }

/// monus(q, p): q when p = λ, otherwise 1^{max(|q|-|p|, 0)}. Empty iff q = λ or 0 < |q| <= |p|.
inline Term monus() {
  return lrn(proj(0, 1), comp(shorten(), {proj(2, 3)}), proj(0, 2));
}

/// cond(y, z, c) = y if c = λ, z otherwise.
inline Term cond() {
  return parse_term(
      "(lrn (proj 0 2) (proj 1 4) (comp (smash) (comp (s1) (proj 0 3)) (comp (s1) (proj 1 3))))");
}

/// F'(f, u, n): the least y <= n with |f(y)| = max_{z<=n} |f(z)|, by bounded
/// recursion with bound F'(f, u, n) <= n. Step: keep the previous index unless
/// f(succ m) is strictly longer than f(previous).
inline Term argmax_length() {
  const Term next = comp(succ(), {proj(1, 3)});
  const Term gain = comp(monus(), {comp(ap(0), {next}), comp(ap(0), {proj(2, 3)})});
  const Term step = comp(cond(), {proj(2, 3), next, gain});
  return br(constant(), step, proj(1, 2));
}

/// L(f, x) = 1^{|f|(|x|)}: f applied to the argmax over all strings of length <= |x|.
inline Term length_functional() {
  const Term index = comp(argmax_length(), {proj(0, 1), comp(unary(), {proj(0, 1)})});
  return comp(unary(), {comp(ap(0), {index})});
}

}  // namespace rbm::funalg::prelude

namespace rbm::funalg {

/// 1^{|f|(|x|)} by brute force over every string of length <= |x|.
inline BitString length_brute_force(const Oracle& f, const BitString& x) {
  check_magnitude(x.size(), "length functional radius");
  const Integer count = pow2(static_cast<unsigned>(x.size()) + 1) - 1;
  if (count > magnitude_cap()) {
    throw ResourceError("length functional: " + count.str() + " strings exceed the magnitude cap");
  }
  std::size_t best = 0;
  for (Integer i = 0; i < count; ++i) best = std::max(best, f(ntob(i)).size());
  return BitString::ones(best);
}

/// 1^{|f|(|x|)} through the bounded-recursion term.
inline BitString length_by_term(const Oracle& f, const BitString& x, Meter* meter = nullptr) {
  static const Term term = prelude::length_functional();
  return evaluate(term, std::vector<Oracle>{f}, std::vector<BitString>{x}, meter);
}

}  // namespace rbm::funalg
