#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "semivalue/mask.hpp"

namespace semivalue {

// One SplitMix64 step.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Folds one word into a seed.  Every worker, run, and named stream derives
// its seed through this, so streams never alias by construction.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t word) {
  std::uint64_t state = seed ^ (word * 0xff51afd7ed558ccdull);
  return splitmix64(state);
}

// FNV-1a, used to fold stream names and estimator tags into seeds.
inline std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// A deterministic random stream.  Instances are cheap; anything that needs
// independence gets its own stream via mix_seed rather than sharing one.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(gen_);
  }

  // Uniform in [0, 1).
  double next_unit() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
  }

  double next_gaussian() { return normal_(gen_); }

  // Uniform over all 2^n masks.
  SubsetMask next_mask(int n) { return {next_below(subset_count(n)), n}; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace semivalue
