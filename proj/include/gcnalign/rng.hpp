#pragma once

#include <cstdint>
#include <random>

namespace gcnalign {

using Rng = std::mt19937_64;

/// Derives the seed of task `index` from a base seed (SplitMix64 finaliser
/// applied to base + golden-ratio * (index + 1)). Sweeps and null ensembles
/// use this so that every realization owns an independent stream.
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace gcnalign
