#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace expsketch {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix_seed(seed);
  for (auto key : keys) h = mix_seed(h ^ mix_seed(key));
  return h;
}

/// Uniform sample of `count` distinct values from [0, population), returned sorted.
/// Partial Fisher-Yates for dense draws, rejection for sparse ones.
std::vector<std::uint32_t> sample_without_replacement(std::uint32_t population, std::uint32_t count,
                                                      Rng& rng);

}  // namespace expsketch
