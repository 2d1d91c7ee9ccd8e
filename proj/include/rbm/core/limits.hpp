#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>

#include "rbm/core/errors.hpp"

namespace rbm {

/// Default cap on the size of any single magnitude: bit length of a natural
/// produced by the growth hierarchy, or length of a string built by the
/// function-algebra evaluator.
inline constexpr std::uint64_t kDefaultMagnitudeCap = std::uint64_t{1} << 20;

/// Environment variable that overrides the default cap.
inline constexpr const char* kMagnitudeCapEnv = "RBM_MAGNITUDE_CAP";

namespace detail {

inline std::uint64_t environment_cap() {
  static const std::uint64_t cap = [] {
    const char* raw = std::getenv(kMagnitudeCapEnv);
    if (raw == nullptr || *raw == '\0') return kDefaultMagnitudeCap;
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0' || parsed == 0) return kDefaultMagnitudeCap;
    return static_cast<std::uint64_t>(parsed);
  }();
  return cap;
}

inline std::optional<std::uint64_t>& cap_override() {
  thread_local std::optional<std::uint64_t> value;
  return value;
}

}  // namespace detail

inline std::uint64_t magnitude_cap() {
  if (const auto& o = detail::cap_override()) return *o;
  return detail::environment_cap();
}

/// Overrides the cap on the current thread for the lifetime of the guard.
class ScopedMagnitudeCap {
 public:
  explicit ScopedMagnitudeCap(std::uint64_t cap) : saved_(detail::cap_override()) {
    detail::cap_override() = cap;
  }
  ~ScopedMagnitudeCap() { detail::cap_override() = saved_; }
  ScopedMagnitudeCap(const ScopedMagnitudeCap&) = delete;
  ScopedMagnitudeCap& operator=(const ScopedMagnitudeCap&) = delete;

 private:
  std::optional<std::uint64_t> saved_;
};

inline void check_magnitude(std::uint64_t size, const char* what) {
  if (size > magnitude_cap()) {
    throw ResourceError(std::string(what) + ": size " + std::to_string(size) +
                        " exceeds magnitude cap " + std::to_string(magnitude_cap()));
  }
}

}  // namespace rbm
