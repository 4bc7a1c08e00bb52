#include "semivalue/sweep.hpp"

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "semivalue/dataset.hpp"
#include "semivalue/exact.hpp"
#include "semivalue/metrics.hpp"
#include "semivalue/tree.hpp"

using namespace semivalue;

TEST_CASE("estimator dispatch and families") {
  CHECK(estimator_family("kernel-banzhaf") == EstimatorFamily::banzhaf);
  CHECK(estimator_family("msr") == EstimatorFamily::banzhaf);
  CHECK(estimator_family("leverage-shap") == EstimatorFamily::shapley);
  CHECK_THROWS_AS(estimator_family("nope"), PreconditionError);

  ThresholdGame g(6, 3);
  auto run = run_estimator("kernel-banzhaf", g, 20, 1);
  CHECK(run.banzhaf_regression.has_value());
  CHECK(!run.shapley_regression.has_value());
  auto run2 = run_estimator("kernel-shap", g, 20, 1);
  CHECK(run2.shapley_regression.has_value());
  auto run3 = run_estimator("exact-banzhaf", g, 0, 1);
  CHECK(run3.report.evals == 64);
}

TEST_CASE("single noiseless kernel run on a linear game has zero error") {
  LinearGame g({1.0, -2.0, 0.5, 3.0});
  SweepConfig cfg;
  cfg.estimators = {"kernel-banzhaf"};
  cfg.sample_sizes = {10};
  cfg.runs = 1;
  cfg.base_seed = 7;
  const auto cells = run_sweep(g, cfg);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].error.empty());
  CHECK(cells[0].median <= 1e-16);
  CHECK(cells[0].mean_evals == 10.0);
}

TEST_CASE("identical configs produce byte-identical CSV") {
  ThresholdGame g(8, 4);
  SweepConfig cfg;
  cfg.estimators = {"kernel-banzhaf", "mc", "msr"};
  cfg.sample_sizes = {18, 36};
  cfg.runs = 7;
  cfg.base_seed = 11;
  CsvMeta meta{"sweep-v1", "{}", false};

  std::ostringstream a, b;
  write_sweep_csv(a, run_sweep(g, cfg), meta);
  write_sweep_csv(b, run_sweep(g, cfg), meta);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("mean_seconds") != std::string::npos);

  // Thread count must not change the rows either.
  SweepConfig threaded = cfg;
  threaded.threads = 3;
  std::ostringstream c;
  write_sweep_csv(c, run_sweep(g, threaded), meta);
  CHECK(a.str() == c.str());
}

TEST_CASE("precondition violations land in the cell's error column") {
  ThresholdGame g(8, 4);
  SweepConfig cfg;
  cfg.estimators = {"kernel-banzhaf"};
  cfg.sample_sizes = {6};  // below the player count
  cfg.runs = 3;
  cfg.base_seed = 1;
  const auto cells = run_sweep(g, cfg);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].error == "budget below feature count");

  // Non-regression estimators cannot produce a condition number.
  SweepConfig cond = cfg;
  cond.estimators = {"msr"};
  cond.sample_sizes = {32};
  cond.metric = SweepMetric::cond;
  const auto cells2 = run_sweep(g, cond);
  CHECK(!cells2[0].error.empty());
}

TEST_CASE("noise sweep: MC error grows with sigma, absolute mode") {
  TableGame g = random_table_game(8, 5);
  SweepConfig cfg;
  cfg.estimators = {"mc"};
  cfg.sample_sizes = {80};
  cfg.sigmas = {0.0, 0.5, 1.0, 2.0};
  cfg.runs = 30;
  cfg.base_seed = 3;
  cfg.max_n = 10;
  const auto cells = run_sweep(g, cfg);
  REQUIRE(cells.size() == 4);
  for (std::size_t k = 1; k < cells.size(); ++k) {
    CHECK(cells[k].median >= cells[k - 1].median);
  }
}

TEST_CASE("relative sigma mode scales noise by the game's output std") {
  // A game with tiny outputs: absolute sigma=1 would drown it, relative
  // sigma=1 stays proportionate.
  std::vector<double> small(64);
  TableGame tiny_base = random_table_game(6, 12);
  for (std::uint64_t i = 0; i < 64; ++i) {
    small[i] = 1e-3 * tiny_base.table()[i];
  }
  TableGame g(6, small);
  SweepConfig cfg;
  cfg.estimators = {"msr"};
  cfg.sample_sizes = {40};
  cfg.sigmas = {1.0};
  cfg.runs = 10;
  cfg.base_seed = 9;
  cfg.sigma_mode = SigmaMode::relative_output_std;
  const auto rel = run_sweep(g, cfg);
  cfg.sigma_mode = SigmaMode::absolute;
  const auto abs = run_sweep(g, cfg);
  CHECK(rel[0].median < abs[0].median);
}

TEST_CASE("scatter export") {
  SUBCASE("exact estimator lies on the diagonal") {
    TableGame g = random_table_game(6, 8);
    const auto rows = scatter_export(g, "exact-banzhaf", 0, 1);
    for (const auto& r : rows) {
      CHECK(r.estimate == doctest::Approx(r.exact).epsilon(1e-12));
      CHECK(r.estimate_normalized ==
            doctest::Approx(r.exact_normalized).epsilon(1e-12));
    }
  }
  SUBCASE("kernel estimator on a linear game lies on the diagonal") {
    LinearGame g({1.0, 2.0, 3.0, 4.0, 5.0});
    const auto rows = scatter_export(g, "kernel-banzhaf", 16, 3);
    for (const auto& r : rows) {
      CHECK(r.estimate == doctest::Approx(r.exact).epsilon(1e-7));
    }
  }
  SUBCASE("normalized columns divide by the exact l2 norm") {
    ThresholdGame g(8, 4);
    const auto rows = scatter_export(g, "msr", 16, 5);
    double norm_sq = 0.0;
    for (const auto& r : rows) norm_sq += r.exact * r.exact;
    const double norm = std::sqrt(norm_sq);
    for (const auto& r : rows) {
      CHECK(r.exact_normalized == doctest::Approx(r.exact / norm));
      CHECK(r.estimate_normalized == doctest::Approx(r.estimate / norm));
    }
  }
}

TEST_CASE("budget accounting in cells matches the analytic counts") {
  ThresholdGame g(6, 3);
  SweepConfig cfg;
  cfg.estimators = {"kernel-banzhaf", "mc", "msr", "kernel-shap"};
  cfg.sample_sizes = {20};
  cfg.runs = 5;
  cfg.base_seed = 2;
  const auto cells = run_sweep(g, cfg);
  REQUIRE(cells.size() == 4);
  for (const auto& c : cells) {
    REQUIRE(c.error.empty());
    if (c.estimator == "mc") {
      CHECK(c.mean_evals == 40.0);
    } else if (c.estimator == "kernel-shap") {
      CHECK(c.mean_evals == 22.0);
    } else {
      CHECK(c.mean_evals == 20.0);
    }
  }
}

TEST_CASE("tree-game sweep: kernel medians fall across 2n, 20n, 2^n") {
  const int n = 10;
  Dataset d = make_synthetic_regression(200, n, 17);
  CartParams params;
  params.n_trees = 15;
  auto ensemble = std::make_shared<const TreeEnsemble>(
      train_cart(d.rows, d.targets, params));
  TreeGame g(ensemble, d.rows[1]);

  SweepConfig cfg;
  cfg.estimators = {"kernel-banzhaf"};
  cfg.sample_sizes = {2u * n, 20u * n, subset_count(n)};
  cfg.runs = 25;
  cfg.base_seed = 6;
  cfg.max_n = n;
  const auto cells = run_sweep(g, cfg);
  REQUIRE(cells.size() == 3);
  CHECK(cells[0].median > cells[1].median);
  CHECK(cells[1].median > cells[2].median);
}

TEST_CASE("kernel at sigma=0 stays below MC at every positive sigma") {
  TableGame g = random_table_game(10, 14);
  SweepConfig cfg;
  cfg.estimators = {"kernel-banzhaf", "mc"};
  cfg.sample_sizes = {100};
  cfg.sigmas = {0.0, 0.5, 1.0, 2.0};
  cfg.runs = 30;
  cfg.base_seed = 21;
  cfg.max_n = 10;
  const auto cells = run_sweep(g, cfg);
  double kernel_clean = -1.0;
  for (const auto& c : cells) {
    REQUIRE(c.error.empty());
    if (c.estimator == "kernel-banzhaf" && c.sigma == 0.0) {
      kernel_clean = c.median;
    }
  }
  REQUIRE(kernel_clean >= 0.0);
  for (const auto& c : cells) {
    if (c.estimator == "mc" && c.sigma > 0.0) {
      CHECK(kernel_clean <= c.median);
    }
  }
}

TEST_CASE("objective metric: optimal residual gap shrinks with the budget") {
  TableGame g = random_table_game(9, 33);
  SweepConfig cfg;
  cfg.estimators = {"kernel-banzhaf"};
  cfg.sample_sizes = {20, 256};
  cfg.runs = 15;
  cfg.base_seed = 4;
  cfg.metric = SweepMetric::objective;
  cfg.max_n = 9;
  const auto cells = run_sweep(g, cfg);
  REQUIRE(cells.size() == 2);
  for (const auto& c : cells) {
    REQUIRE(c.error.empty());
    CHECK(c.median >= 0.0);
  }
  CHECK(cells[1].median < cells[0].median);

  SweepConfig bad = cfg;
  bad.estimators = {"kernel-shap"};
  const auto rejected = run_sweep(g, bad);
  CHECK(!rejected[0].error.empty());
}

TEST_CASE("scatter rows reproduce the squared-error metric") {
  ThresholdGame g(8, 4);
  const auto rows = scatter_export(g, "msr", 16, 9);
  double from_rows = 0.0;
  std::vector<double> est, exact;
  for (const auto& r : rows) {
    from_rows += (r.estimate - r.exact) * (r.estimate - r.exact);
    est.push_back(r.estimate);
    exact.push_back(r.exact);
  }
  CHECK(from_rows == doctest::Approx(l2_sq_error(est, exact)).epsilon(1e-12));
  CHECK(from_rows > 0.0);  // m=2n leaves visible scatter
}
