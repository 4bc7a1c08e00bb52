#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "semivalue/game.hpp"
#include "semivalue/regression.hpp"

namespace semivalue {

// w(s) = (n-1) / (C(n,s) * s * (n-s)) for 1 <= s <= n-1.
double shapley_kernel_weight(int n, int s);

// Per-size leverage of the kernel-weighted design, from the closed-form
// Gram G = sum_s C(n,s) w(s) E[z z^T | |z|=s]: l(s) = w(s) z^T G^{-1} z for
// any |z| = s (symmetric in s).  Index [s-1] holds l(s).
std::vector<double> shapley_leverage_scores(int n);

// Population Gram of the constraint-eliminated kernel-weighted design,
// (n-1) x (n-1); the reference matrix for the Shapley-side condition-number
// diagnostic.
Eigen::MatrixXd shapley_reduced_gram(int n);

struct ShapleySolveResult {
  std::vector<double> values;
  Eigen::Index rank = 0;
  bool singular = false;
};

// Solves min || sqrt(w) (Z x - t) ||_2 subject to sum(x) = total by
// eliminating the last variable; singular reduced systems fall back to the
// min-norm solution and are flagged.  The constraint holds exactly by
// construction.
ShapleySolveResult solve_shapley_regression(const ShapleyRegression& reg,
                                            int n);

double condition_number_shapley(const ShapleyRegression& reg, int n);

struct ShapleyEstimateResult {
  Attribution report;
  ShapleyRegression regression;
};

// Paired kernel-weighted sampling: coalition sizes drawn with probability
// proportional to C(n,s) w(s) (i.e. 1/(s(n-s))), a uniform subset of that
// size paired with its complement, plus the two anchor evaluations v(empty)
// and v(full).  Sampling with replacement; costs m + 2 evaluations.
ShapleyEstimateResult kernel_shap(Game& g, std::uint64_t m,
                                  std::uint64_t seed);

// Sizes drawn proportional to C(n,s) l(s); rows carry the w(s)/q(S)
// importance correction before the constrained solve.  Pairing is valid
// because l(s) = l(n-s).
ShapleyEstimateResult leverage_shap(Game& g, std::uint64_t m,
                                    std::uint64_t seed);

// Full-enumeration limit shared by both baselines: every mask with
// 0 < |S| < n once, weighted by w(s).  Matches the exact Shapley values.
ShapleyEstimateResult shapley_full_regression(Game& g, int max_n = 20,
                                              const char* estimator_name =
                                                  "kernel-shap-full");

}  // namespace semivalue
