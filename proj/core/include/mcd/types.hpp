#pragma once

#include <cstdint>
#include <vector>

namespace mcd {

using BitVector = std::vector<uint8_t>;
using LlrVector = std::vector<double>;

// Bijection on {0..n-1}: output position map[j] takes input position j.
// Keeps the seed it was drawn from so run metadata can reproduce it.
struct Permutation {
  std::vector<int> map;
  uint64_t seed = 0;
};

// Soft values everywhere are clamped to this magnitude.
inline constexpr double kLlrClamp = 30.0;

}  // namespace mcd
