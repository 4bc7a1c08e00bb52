#pragma once

#include <cstdint>

#include "semivalue/game.hpp"
#include "semivalue/regression.hpp"

namespace semivalue {

// Alias kept for readers coming from the estimator side: the report an
// estimator returns is an Attribution with budget/evals/seed filled in.
using EstimateReport = Attribution;

struct KernelBanzhafResult {
  EstimateReport report;
  SampledRegression regression;
};

// Regression estimator with paired uniform sampling: draws m/2 masks
// i.i.d. with replacement, adds each mask together with its complement,
// and solves the minimum-norm least squares on the +-1/2 design.  Uniform
// sampling coincides with leverage-score sampling here because every row of
// the full design has leverage n/2^n.
//
// Requires n < m <= 2^n and m even; costs exactly m evaluations.
KernelBanzhafResult kernel_banzhaf(Game& g, std::uint64_t m,
                                   std::uint64_t seed);

// Ablation: m i.i.d. uniform masks, no complements, otherwise identical.
KernelBanzhafResult kernel_banzhaf_unpaired(Game& g, std::uint64_t m,
                                            std::uint64_t seed);

// Paired sampling of complement pairs without replacement across pairs; at
// m = 2^n every subset appears exactly once and the solve reproduces the
// full regression.
KernelBanzhafResult kernel_banzhaf_swor(Game& g, std::uint64_t m,
                                        std::uint64_t seed);

// Per-player Monte Carlo over marginal differences.  The budget m is split
// round-robin (player i gets ceil(m/n) if i < m mod n else floor(m/n)), so
// exactly m subsets are drawn; each costs two evaluations, v(S+i) then
// v(S).  Requires m >= n.
EstimateReport mc_banzhaf(Game& g, std::uint64_t m, std::uint64_t seed);

// Maximum Sample Reuse: m masks uniform over all 2^n subsets; the estimate
// for player i is the mean of v over masks containing i minus the mean over
// masks excluding i.  A player whose in-set or out-of-set side is empty gets
// 0 and the report is flagged.  Requires m >= 2; costs m evaluations.
EstimateReport msr_banzhaf(Game& g, std::uint64_t m, std::uint64_t seed);

}  // namespace semivalue
