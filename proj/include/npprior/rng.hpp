#pragma once

#include <cstdint>

namespace npprior {

/// splitmix64 finalizer; full 64-bit avalanche.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Stated mixing function for derived seeds: chunk/restart/stream k of a
/// base seed draws from splitmix64(seed XOR golden-ratio * (k+1)).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ (0x9E3779B97F4A7C15ull * (stream + 1)));
}

}  // namespace npprior
