#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rbm/core/errors.hpp"

namespace rbm {

/// Minimal s-expression tree: either an atom or a parenthesized list.
struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t position = 0;

  bool is_atom() const noexcept { return !is_list; }
  /// Head symbol of a non-empty list whose first item is an atom, else "".
  const std::string& head() const {
    static const std::string none;
    if (!is_list || items.empty() || items.front().is_list) return none;
    return items.front().atom;
  }

  std::string str() const {
    if (!is_list) return atom;
    std::string out = "(";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ' ';
      out += items[i].str();
    }
    return out + ")";
  }
};

namespace detail {

class SExprReader {
 public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  SExpr read_all() {
    skip();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    SExpr e = read();
    skip();
    if (pos_ != text_.size()) throw ParseError("trailing input after expression", pos_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip();
    if (pos_ == text_.size()) throw ParseError("unexpected end of input", pos_);
    SExpr e;
    e.position = pos_;
    if (text_[pos_] == ')') throw ParseError("unexpected ')'", pos_);
    if (text_[pos_] == '(') {
      e.is_list = true;
      ++pos_;
      for (;;) {
        skip();
        if (pos_ == text_.size()) throw ParseError("unclosed '('", e.position);
        if (text_[pos_] == ')') {
          ++pos_;
          return e;
        }
        e.items.push_back(read());
      }
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ';' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    e.atom = std::string(text_.substr(start, pos_ - start));
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline SExpr parse_sexpr(std::string_view text) { return detail::SExprReader(text).read_all(); }

}  // namespace rbm
