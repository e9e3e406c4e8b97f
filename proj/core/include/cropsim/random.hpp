#pragma once

#include <cstdint>
#include <random>

namespace cropsim {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; decorrelates nearby integer seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for sub-stream `index` of purpose `stream` under `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0) {
  return mix_seed(mix_seed(mix_seed(base) ^ stream) ^ index);
}

// Stream tags used with derive_seed.
inline constexpr std::uint64_t kWeatherStream = 0x57454154;   // daily weather
inline constexpr std::uint64_t kPerturbStream = 0x50455254;   // stochastic-mode noise
inline constexpr std::uint64_t kEvalStream = 0x4556414c;      // evaluation episode seeds
inline constexpr std::uint64_t kEpisodeStream = 0x45504953;   // training episode seeds
inline constexpr std::uint64_t kPolicyStream = 0x504f4c49;    // policy randomness

}  // namespace cropsim
