#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace circrect {

// SplitMix64. Output and the uniform/normal mappings are fixed here so
// streams can be reproduced outside C++:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// uniform() = (next() >> 11) * 2^-53, in [0, 1).
// normal()  = Box-Muller on two uniforms u1, u2: sqrt(-2 ln(1 - u1)) cos(2 pi u2).
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) noexcept : m_state{seed} {}

  auto next() noexcept -> std::uint64_t {
    m_state += 0x9E3779B97F4A7C15ULL;
    auto z = m_state;
    z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31U);
  }

  auto uniform() noexcept -> double {
    return static_cast<double>(next() >> 11U) * 0x1.0p-53;
  }

  auto uniform(double lo, double hi) noexcept -> double { return lo + (hi - lo) * uniform(); }

  auto normal() noexcept -> double {
    const auto u1 = uniform();
    const auto u2 = uniform();
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::uint64_t m_state;
};

} // namespace circrect
