#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include "rbm/core/errors.hpp"
#include "rbm/core/limits.hpp"
#include "rbm/core/numeric.hpp"

namespace rbm {

/// A finite binary string. The empty string prints as `~`.
class BitString {
 public:
  BitString() = default;

  /// Accepts characters 0/1 only; `~` (alone) denotes the empty string.
  explicit BitString(std::string_view bits) {
    if (bits == "~") return;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] != '0' && bits[i] != '1') {
        throw ParseError("invalid bit '" + std::string(1, bits[i]) + "' in string '" +
                             std::string(bits) + "'",
                         i);
      }
    }
    bits_ = bits;
  }

  static BitString ones(std::size_t n) { return repeat('1', n); }
  static BitString zeros(std::size_t n) { return repeat('0', n); }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  int operator[](std::size_t i) const { return bits_.at(i) == '1' ? 1 : 0; }
  int back() const { return (*this)[size() - 1]; }

  BitString with(int bit) const {
    BitString out = *this;
    out.bits_.push_back(bit ? '1' : '0');
    return out;
  }
  BitString operator+(const BitString& other) const {
    BitString out = *this;
    out.bits_ += other.bits_;
    return out;
  }
  BitString prefix(std::size_t n) const {
    BitString out;
    out.bits_ = bits_.substr(0, n);
    return out;
  }
  /// Drops the last bit; the empty string stays empty.
  BitString parent() const { return prefix(empty() ? 0 : size() - 1); }

  /// this ⊑ other.
  bool is_prefix_of(const BitString& other) const {
    return size() <= other.size() && other.bits_.compare(0, size(), bits_) == 0;
  }
  /// this ⊏ other.
  bool is_proper_prefix_of(const BitString& other) const {
    return size() < other.size() && is_prefix_of(other);
  }
  bool comparable(const BitString& other) const {
    return is_prefix_of(other) || other.is_prefix_of(*this);
  }

  bool all(char c) const { return bits_.find_first_not_of(c) == std::string::npos; }

  const std::string& bits() const noexcept { return bits_; }
  std::string str() const { return empty() ? std::string("~") : bits_; }

  friend bool operator==(const BitString&, const BitString&) = default;
  /// Standard enumeration order: shorter first, then lexicographic.
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    return a.bits_.compare(b.bits_) <=> 0;
  }

  friend std::ostream& operator<<(std::ostream& os, const BitString& w) { return os << w.str(); }

 private:
  static BitString repeat(char c, std::size_t n) {
    check_magnitude(n, "string length");
    BitString out;
    out.bits_.assign(n, c);
    return out;
  }

  std::string bits_;
};

/// Index of w in the enumeration λ, 0, 1, 00, 01, ...
inline Integer bton(const BitString& w) {
  Integer n = 1;
  for (char c : w.bits()) {
    n <<= 1;
    if (c == '1') n |= 1;
  }
  return n - 1;
}

inline BitString ntob(const Integer& n) {
  if (n < 0) throw DomainError("ntob: negative index " + n.str());
  const Integer m = n + 1;
  const auto top = floor_log2(m);
  check_magnitude(top, "ntob");
  std::string bits(top, '0');
  for (std::uint64_t i = 0; i < top; ++i) {
    if (boost::multiprecision::bit_test(m, top - 1 - i)) bits[i] = '1';
  }
  return BitString(bits.empty() ? std::string_view("~") : std::string_view(bits));
}

/// Next string in the enumeration.
inline BitString successor(const BitString& w) {
  if (w.all('1')) return BitString::zeros(w.size() + 1);
  std::string bits = w.bits();
  std::size_t i = bits.size();
  while (bits[i - 1] == '1') bits[--i] = '0';
  bits[i - 1] = '1';
  return BitString(bits);
}

/// Previous string in the enumeration, clamped at λ.
inline BitString predecessor(const BitString& w) {
  if (w.empty()) return w;
  if (w.all('0')) return BitString::ones(w.size() - 1);
  std::string bits = w.bits();
  std::size_t i = bits.size();
  while (bits[i - 1] == '0') bits[--i] = '1';
  bits[i - 1] = '0';
  return BitString(bits);
}

/// #(u, v) = 1^{|u||v|}.
inline BitString smash(const BitString& u, const BitString& v) {
  if (u.size() != 0 && v.size() > magnitude_cap() / u.size()) {
    throw ResourceError("smash: length " + std::to_string(u.size()) + "*" +
                        std::to_string(v.size()) + " exceeds magnitude cap " +
                        std::to_string(magnitude_cap()));
  }
  return BitString::ones(u.size() * v.size());
}

}  // namespace rbm

template <>
struct std::hash<rbm::BitString> {
  std::size_t operator()(const rbm::BitString& w) const noexcept {
    return std::hash<std::string>{}(w.bits());
  }
};
