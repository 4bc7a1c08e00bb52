#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "semivalue/game.hpp"
#include "semivalue/regression.hpp"

namespace semivalue {

enum class EstimatorFamily { banzhaf, shapley };

// Maps a CLI estimator name to its family; throws on unknown names.
// Known names: kernel-banzhaf, kernel-banzhaf-unpaired, kernel-banzhaf-swor,
// mc, msr, kernel-shap, leverage-shap, exact-banzhaf, exact-shapley.
EstimatorFamily estimator_family(const std::string& name);

struct EstimatorRun {
  Attribution report;
  std::optional<SampledRegression> banzhaf_regression;
  std::optional<ShapleyRegression> shapley_regression;
};

// Runs one named estimator against a game.  max_n guards the exact oracles.
EstimatorRun run_estimator(const std::string& name, Game& g, std::uint64_t m,
                           std::uint64_t seed, int max_n = 20);

enum class SweepMetric { l2_sq, normalized_l2_sq, objective, cond, spectral };
enum class SigmaMode { absolute, relative_output_std };

const char* to_string(SweepMetric m);
const char* to_string(SigmaMode m);

struct SweepConfig {
  std::vector<std::string> estimators;
  std::vector<std::uint64_t> sample_sizes;
  std::vector<double> sigmas{0.0};
  int runs = 50;
  std::uint64_t base_seed = 0;
  SweepMetric metric = SweepMetric::l2_sq;
  SigmaMode sigma_mode = SigmaMode::absolute;
  int max_n = 20;   // enumeration guard for the exact reference
  int threads = 0;  // work-pool cap; 0 = OpenMP default
};

// One (estimator, m, sigma) cell: nearest-rank percentiles of the per-run
// metric against the noiseless exact values, plus budget accounting.  A
// cell whose runs violate an estimator precondition carries the error
// message instead of numbers.
struct SweepCell {
  std::string estimator;
  std::uint64_t m = 0;
  double sigma = 0.0;
  double median = 0.0;
  double p25 = 0.0;
  double p75 = 0.0;
  double mean_evals = 0.0;
  double mean_seconds = 0.0;
  std::string error;
};

// Runs every cell x run combination in a deterministic work pool: the cell
// seed is derived from (base seed, estimator, m, sigma, run index), each
// run clones the base game, and output order never depends on scheduling.
std::vector<SweepCell> run_sweep(const Game& base, const SweepConfig& cfg);

struct ScatterRow {
  int feature = 0;
  double exact = 0.0;
  double estimate = 0.0;
  double exact_normalized = 0.0;     // exact / ||phi||_2
  double estimate_normalized = 0.0;  // estimate / ||phi||_2
};

std::vector<ScatterRow> scatter_export(const Game& base,
                                       const std::string& estimator,
                                       std::uint64_t m, std::uint64_t seed,
                                       int max_n = 20);

struct CsvMeta {
  std::string schema;       // e.g. "sweep-v1"
  std::string config_json;  // resolved configuration echo
  bool timings = false;     // emit wall-time columns
};

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells,
                     const CsvMeta& meta);
void write_scatter_csv(std::ostream& os, const std::vector<ScatterRow>& rows,
                       const CsvMeta& meta);

}  // namespace semivalue
