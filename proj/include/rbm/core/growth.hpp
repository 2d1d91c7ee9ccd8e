#pragma once

#include <cstdint>
#include <string>

#include "rbm/core/limits.hpp"
#include "rbm/core/numeric.hpp"

namespace rbm {

/// floor(log2 n) with log 0 = log 1 = 0.
inline Integer floor_log(const Integer& n) {
  if (n <= 1) return 0;
  return Integer(floor_log2(n));
}

/// The growth hierarchy: g_0(n) = 2n, g_1(n) = n^2, g_i(n) = 2^{g_{i-1}(log n)} for i >= 2.
///
/// Results whose bit length exceeds the magnitude cap raise ResourceError.
inline Integer growth(unsigned i, const Integer& n) {
  if (n < 0) throw DomainError("g: negative argument " + n.str());
  Integer out;
  if (i == 0) {
    out = 2 * n;
  } else if (i == 1) {
    check_magnitude(2 * bit_length(n), "g_1");
    out = n * n;
  } else {
    const Integer e = growth(i - 1, floor_log(n));
    if (e >= Integer(magnitude_cap())) {
      throw ResourceError("g_" + std::to_string(i) + "(" + n.str() + "): exponent " + e.str() +
                          " exceeds magnitude cap " + std::to_string(magnitude_cap()));
    }
    out = pow2(static_cast<std::uint64_t>(e));
  }
  check_magnitude(bit_length(out), "g");
  return out;
}

}  // namespace rbm
