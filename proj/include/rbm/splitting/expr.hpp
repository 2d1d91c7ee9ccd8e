#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rbm/core/sexpr.hpp"
#include "rbm/splitting/sequence.hpp"

namespace rbm {

/// Builds a measurement from a set expression over ν:
///   (cyl w) | (compl E) | (cap E F) | (cup E F) | (complete E)
///   | (null-union E ...) | (limit E0 E1 ... [(gamma k)])
inline SplittingOperator build_set_expression(const SExpr& e, const ProbabilityMeasure& nu) {
  auto fail = [&](const std::string& what) { return ParseError(what, e.position); };
  if (!e.is_list || e.items.empty() || e.items[0].is_list) {
    throw fail("set expression must be a list headed by an operator, got " + e.str());
  }
  const std::string& head = e.items[0].atom;
  const std::size_t argc = e.items.size() - 1;
  auto child = [&](std::size_t i) { return build_set_expression(e.items[i], nu); };
  auto arity = [&](std::size_t n) {
    if (argc != n) {
      throw fail("(" + head + " ...) takes " + std::to_string(n) + " argument(s), got " +
                 std::to_string(argc));
    }
  };
  if (head == "cyl") {
    arity(1);
    if (e.items[1].is_list) throw fail("(cyl w) needs a bit string");
    return cylinder(BitString(e.items[1].atom), nu);
  }
  if (head == "compl") {
    arity(1);
    return complement(child(1));
  }
  if (head == "cap" || head == "cup") {
    arity(2);
    return intersect_union(child(1), child(2),
                           head == "cap" ? SetOp::intersection : SetOp::union_);
  }
  if (head == "complete") {
    arity(1);
    return complete_null(child(1));
  }
  if (head == "null-union") {
    if (argc == 0) throw fail("(null-union ...) needs at least one set");
    std::vector<SplittingOperator> members;
    for (std::size_t i = 1; i <= argc; ++i) members.push_back(child(i));
    return limit_measurement(union_sequence(std::move(members)));
  }
  if (head == "limit") {
    std::vector<SplittingOperator> members;
    std::optional<std::size_t> gamma;
    for (std::size_t i = 1; i <= argc; ++i) {
      const SExpr& item = e.items[i];
      if (item.is_list && item.head() == "gamma") {
        if (item.items.size() != 2 || item.items[1].is_list) throw fail("(gamma k) needs one number");
        const Integer k = detail::parse_integer(item.items[1].atom);
        if (k < 0 || k > 1'000'000) throw fail("(gamma k) needs 0 <= k <= 1000000");
        gamma = static_cast<std::size_t>(k);
        continue;
      }
      members.push_back(child(i));
    }
    if (members.empty()) throw fail("(limit ...) needs at least one set");
    return limit_measurement(finite_sequence(std::move(members), gamma));
  }
  throw fail("unknown set operator '" + head + "'");
}

inline SplittingOperator parse_set_expression(std::string_view text, const ProbabilityMeasure& nu) {
  return build_set_expression(parse_sexpr(text), nu);
}

}  // namespace rbm
