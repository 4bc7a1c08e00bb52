#pragma once

#include <bit>
#include <cstdint>
#include <string>

#include "semivalue/errors.hpp"

namespace semivalue {

// Masks are machine integers, which caps the player count at 63.  All exact
// oracles enumerate 2^n subsets, so larger n is unreachable anyway.
inline constexpr int kMaxPlayers = 63;

// A coalition S subseteq {0,...,n-1} packed into the low n bits of a word;
// bit i set <=> player i is in S.
struct SubsetMask {
  std::uint64_t bits = 0;
  int n = 0;

  bool contains(int player) const { return (bits >> player) & 1u; }
  SubsetMask with(int player) const {
    return {bits | (std::uint64_t{1} << player), n};
  }
  SubsetMask without(int player) const {
    return {bits & ~(std::uint64_t{1} << player), n};
  }
  int count() const { return std::popcount(bits); }

  bool operator==(const SubsetMask&) const = default;
};

inline std::uint64_t subset_count(int n) { return std::uint64_t{1} << n; }

inline SubsetMask empty_mask(int n) { return {0, n}; }

inline SubsetMask full_mask(int n) { return {subset_count(n) - 1, n}; }

inline SubsetMask complement(SubsetMask m) {
  return {~m.bits & (subset_count(m.n) - 1), m.n};
}

// Validating constructor: bits must fit below 2^n.
inline SubsetMask make_mask(std::uint64_t bits, int n) {
  if (n < 1 || n > kMaxPlayers) {
    throw PreconditionError("player count must be in [1, 63], got " +
                            std::to_string(n));
  }
  if (bits >= subset_count(n)) {
    throw PreconditionError("mask " + std::to_string(bits) +
                            " out of range for n=" + std::to_string(n));
  }
  return {bits, n};
}

}  // namespace semivalue
