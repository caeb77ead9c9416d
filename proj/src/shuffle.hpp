#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace wattcolor::detail {

// Fisher-Yates driven by mt19937_64, whose output sequence is fixed by the
// standard, so a seed gives the same order on every platform.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
  if (v.size() < 2) return;
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size() - 1; i > 0; --i) std::swap(v[i], v[rng() % (i + 1)]);
}

}  // namespace wattcolor::detail
