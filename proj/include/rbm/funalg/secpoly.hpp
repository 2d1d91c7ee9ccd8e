#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rbm/core.hpp"

namespace rbm::funalg {

/// Second-order quasi^i-polynomial over n1, n2, ... and L1, L2, ...
/// Syntax: integers, n<j>, (+ P ...), (* P ...), (L<j> P) or (L j P), (g i P).
class SecPoly {
 public:
  enum class Op { constant, variable, plus, times, length, growth };

  static SecPoly number(Integer c) { return SecPoly(Op::constant, std::move(c), 0, {}); }
  static SecPoly variable(std::size_t j) { return SecPoly(Op::variable, 0, j, {}); }
  static SecPoly plus(std::vector<SecPoly> terms) { return SecPoly(Op::plus, 0, 0, std::move(terms)); }
  static SecPoly times(std::vector<SecPoly> terms) {
    return SecPoly(Op::times, 0, 0, std::move(terms));
  }
  static SecPoly length(std::size_t j, SecPoly p) { return SecPoly(Op::length, 0, j, {std::move(p)}); }
  static SecPoly growth(std::size_t i, SecPoly p) { return SecPoly(Op::growth, 0, i, {std::move(p)}); }

  using LengthFn = std::function<Integer(const Integer&)>;

  /// Value with L_j bound to lengths[j-1] and n_j to nvals[j-1].
  Integer eval(const std::vector<LengthFn>& lengths, const std::vector<Integer>& nvals) const {
    switch (op_) {
      case Op::constant: return constant_;
      case Op::variable:
        if (index_ == 0 || index_ > nvals.size()) {
          throw PreconditionError("unbound variable n" + std::to_string(index_) + " (" +
                                  std::to_string(nvals.size()) + " bound)");
        }
        return nvals[index_ - 1];
      case Op::plus: {
        Integer s = 0;
        for (const auto& t : kids_) s += t.eval(lengths, nvals);
        return s;
      }
      case Op::times: {
        Integer s = 1;
        for (const auto& t : kids_) s *= t.eval(lengths, nvals);
        check_magnitude(bit_length(s), "polynomial value bit length");
        return s;
      }
      case Op::length: {
        if (index_ == 0 || index_ > lengths.size()) {
          throw PreconditionError("unbound length variable L" + std::to_string(index_) + " (" +
                                  std::to_string(lengths.size()) + " bound)");
        }
        return lengths[index_ - 1](kids_[0].eval(lengths, nvals));
      }
      case Op::growth: return rbm::growth(static_cast<unsigned>(index_), kids_[0].eval(lengths, nvals));
    }
    throw PreconditionError("bad polynomial node");
  }

  std::string str() const {
    switch (op_) {
      case Op::constant: return constant_.str();
      case Op::variable: return "n" + std::to_string(index_);
      case Op::length: return "(L" + std::to_string(index_) + " " + kids_[0].str() + ")";
      case Op::growth: return "(g " + std::to_string(index_) + " " + kids_[0].str() + ")";
      default: break;
    }
    std::string out = op_ == Op::plus ? "(+" : "(*";
    for (const auto& t : kids_) out += " " + t.str();
    return out + ")";
  }

 private:
  SecPoly(Op op, Integer c, std::size_t index, std::vector<SecPoly> kids)
      : op_(op), constant_(std::move(c)), index_(index), kids_(std::move(kids)) {}

  Op op_;
  Integer constant_;
  std::size_t index_;
  std::vector<SecPoly> kids_;
};

namespace detail {

inline std::size_t suffix_index(const std::string& atom, std::size_t from, std::size_t position) {
  const std::string digits = atom.substr(from);
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos ||
      digits.size() > 6) {
    throw ParseError("bad variable '" + atom + "'", position);
  }
  const std::size_t j = std::stoul(digits);
  if (j == 0) throw ParseError("variables are numbered from 1: '" + atom + "'", position);
  return j;
}

inline SecPoly build_secpoly(const SExpr& e) {
  if (!e.is_list) {
    if (!e.atom.empty() && e.atom[0] == 'n') return SecPoly::variable(suffix_index(e.atom, 1, e.position));
    const Integer c = rbm::detail::parse_integer(e.atom);
    if (c < 0) throw ParseError("polynomial constants are natural numbers", e.position);
    return SecPoly::number(c);
  }
  const std::string& head = e.head();
  if (head.empty()) throw ParseError("polynomial list must start with an operator", e.position);
  const std::size_t argc = e.items.size() - 1;
  if (head == "+" || head == "*") {
    if (argc == 0) throw ParseError("(" + head + ") needs operands", e.position);
    std::vector<SecPoly> terms;
    for (std::size_t i = 1; i <= argc; ++i) terms.push_back(build_secpoly(e.items[i]));
    return head == "+" ? SecPoly::plus(std::move(terms)) : SecPoly::times(std::move(terms));
  }
  if (head == "L" || head == "g") {
    if (argc != 2 || e.items[1].is_list) {
      throw ParseError("(" + head + " j P) takes an index and one polynomial", e.position);
    }
    const Integer j = rbm::detail::parse_integer(e.items[1].atom);
    if (j < 0 || j > 64 || (head == "L" && j == 0)) {
      throw ParseError("index out of range in (" + head + " ...)", e.position);
    }
    SecPoly inner = build_secpoly(e.items[2]);
    return head == "L" ? SecPoly::length(static_cast<std::size_t>(j), std::move(inner))
                       : SecPoly::growth(static_cast<std::size_t>(j), std::move(inner));
  }
  if (head[0] == 'L') {
    if (argc != 1) throw ParseError("(" + head + " P) takes one polynomial", e.position);
    return SecPoly::length(suffix_index(head, 1, e.position), build_secpoly(e.items[1]));
  }
  throw ParseError("unknown polynomial operator '" + head + "'", e.position);
}

}  // namespace detail

inline SecPoly parse_secpoly(std::string_view text) {
  return detail::build_secpoly(parse_sexpr(text));
}

}  // namespace rbm::funalg
