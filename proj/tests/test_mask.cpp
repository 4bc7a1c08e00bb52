#include "semivalue/mask.hpp"

#include "doctest.h"
#include "semivalue/rng.hpp"

using namespace semivalue;

TEST_CASE("complement flips every bit below n") {
  CHECK(complement(make_mask(0b101, 3)).bits == 0b010);
  CHECK(complement(make_mask(0b000, 3)).bits == 0b111);
  CHECK(complement(make_mask(0b10110, 5)).bits == 0b01001);
}

TEST_CASE("complement is an involution and popcounts sum to n") {
  RngStream rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(kMaxPlayers));
    const SubsetMask m = rng.next_mask(n);
    CHECK(complement(complement(m)) == m);
    CHECK(m.count() + complement(m).count() == n);
    CHECK(m.bits < subset_count(n));
  }
}

TEST_CASE("mask validation") {
  CHECK_THROWS_AS(make_mask(8, 3), PreconditionError);
  CHECK_THROWS_AS(make_mask(0, 0), PreconditionError);
  CHECK_THROWS_AS(make_mask(0, 64), PreconditionError);
  CHECK(full_mask(4).count() == 4);
  CHECK(empty_mask(4).count() == 0);
}

TEST_CASE("with/without/contains") {
  SubsetMask m = empty_mask(5);
  m = m.with(0).with(3);
  CHECK(m.bits == 0b01001);
  CHECK(m.contains(0));
  CHECK(!m.contains(1));
  CHECK(m.without(0).bits == 0b01000);
}
