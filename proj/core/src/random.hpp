#pragma once

#include <cstdint>
#include <limits>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

// Portable seeded randomness. std::seed_seq and std::mt19937_64 are fully
// specified by the standard; the bounded draw and shuffle below are written
// out because the std distributions are not.
namespace sqeval::detail {

inline std::mt19937_64 make_rng(std::initializer_list<std::uint64_t> words) {
  std::vector<std::uint32_t> seeds;
  for (std::uint64_t w : words) {
    seeds.push_back(static_cast<std::uint32_t>(w));
    seeds.push_back(static_cast<std::uint32_t>(w >> 32));
  }
  std::seed_seq seq(seeds.begin(), seeds.end());
  return std::mt19937_64(seq);
}

/// Uniform draw from [0, bound), bound > 0.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace sqeval::detail
