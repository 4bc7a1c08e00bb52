#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "semivalue/game.hpp"
#include "semivalue/regression.hpp"

namespace semivalue {

struct ExactOptions {
  int max_n = 20;   // enumeration guard, configurable
  int threads = 0;  // 0 = OpenMP default
};

// Fixed block size for the enumeration kernel.  Each block evaluates on its
// own game clone (stream = block index), so results are identical for any
// thread count, including the serial reference.
inline constexpr std::uint64_t kEnumBlock = 1024;

// All 2^n set-function values in ascending mask order, evaluated blockwise
// in parallel.  Costs exactly 2^n evaluations.
struct EnumeratedValues {
  int n = 0;
  std::vector<double> values;
  std::uint64_t evals = 0;
};

EnumeratedValues enumerate_values(const Game& g, const ExactOptions& opts = {});

// Accumulation kernels over an enumerated value table.  Blockwise partial
// sums are reduced in fixed block order, so outputs do not depend on the
// thread count.
std::vector<double> banzhaf_from_values(std::span<const double> values, int n,
                                        int threads = 0);
std::vector<double> shapley_from_values(std::span<const double> values, int n,
                                        int threads = 0);

// Average marginal contribution over all subsets of the other players,
// uniformly weighted; exactly 2^n evaluations through the value cache.
Attribution exact_banzhaf(const Game& g, const ExactOptions& opts = {});

// Size-weighted average marginal contribution.
Attribution exact_shapley(const Game& g, const ExactOptions& opts = {});

FullRegression build_full_regression(const Game& g,
                                     const ExactOptions& opts = {});

// Least-squares solution of the full design; equals the Banzhaf values up
// to numerical tolerance.
Attribution regression_banzhaf(const FullRegression& fr);

struct GammaResult {
  double gamma = 0.0;
  bool infinite = false;  // ||A phi|| vanished (all-zero solution)
};

// gamma = ||A phi - b||^2 / ||A phi||^2 with phi the least-squares
// solution; zero iff b lies in the span of the design.
GammaResult gamma_statistic(const FullRegression& fr);

// Streaming variant: same value without materializing the 2^n x n design.
GammaResult gamma_from_values(std::span<const double> values,
                              std::span<const double> phi, int n,
                              int threads = 0);

}  // namespace semivalue
