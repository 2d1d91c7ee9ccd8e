#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "rbm/funalg.hpp"

namespace rbm::testing {

inline BitString random_string(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::bernoulli_distribution bit(0.5);
  const std::size_t n = len(rng);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += bit(rng) ? '1' : '0';
  return s.empty() ? BitString() : BitString(s);
}

/// Table oracle over random queries of length <= max_query with answers of
/// length <= max_answer, plus a random default.
inline funalg::Oracle random_oracle(std::mt19937_64& rng, std::size_t entries, std::size_t max_query,
                                    std::size_t max_answer) {
  std::map<BitString, BitString> table;
  for (std::size_t i = 0; i < entries; ++i) {
    table[random_string(rng, 0, max_query)] = random_string(rng, 0, max_answer);
  }
  return funalg::Oracle::table(std::move(table), random_string(rng, 0, max_answer / 2));
}

/// max_{|w|<=n} |f(w)| by direct enumeration.
inline std::size_t enumerate_length(const funalg::Oracle& f, std::size_t n) {
  std::size_t best = 0;
  std::string w;
  for (std::size_t len = 0; len <= n; ++len) {
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << len); ++bits) {
      w.clear();
      for (std::size_t i = 0; i < len; ++i) w += (bits >> (len - 1 - i)) & 1 ? '1' : '0';
      best = std::max(best, f(w.empty() ? BitString() : BitString(w)).size());
    }
  }
  return best;
}

}  // namespace rbm::testing
