#include "semivalue/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "semivalue/exact.hpp"
#include "semivalue/metrics.hpp"

using namespace semivalue;

namespace {

double max_abs_diff(const std::vector<double>& a,
                    const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
  }
  return d;
}

}  // namespace

TEST_CASE("kernel banzhaf input contract") {
  ThresholdGame g(8, 4);
  CHECK_THROWS_WITH_AS(kernel_banzhaf(g, 8, 1), "budget below feature count",
                       PreconditionError);
  CHECK_THROWS_AS(kernel_banzhaf(g, 21, 1), PreconditionError);  // odd
  CHECK_THROWS_AS(kernel_banzhaf(g, 512, 1), PreconditionError);  // > 2^n
  CHECK_THROWS_AS(kernel_banzhaf_swor(g, 512, 1), PreconditionError);
}

TEST_CASE("pairing invariant: rows negate, masks complement") {
  ThresholdGame g(7, 3);
  auto res = kernel_banzhaf(g, 40, 9);
  const auto& sr = res.regression;
  CHECK(sr.paired);
  REQUIRE(sr.A_tilde.rows() == 40);
  for (int p = 0; p < 20; ++p) {
    CHECK((sr.A_tilde.row(2 * p) + sr.A_tilde.row(2 * p + 1)).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK(sr.masks[2 * p + 1] == complement(sr.masks[2 * p]));
  }
  for (Eigen::Index r = 0; r < sr.A_tilde.rows(); ++r) {
    for (int i = 0; i < 7; ++i) {
      CHECK(std::abs(sr.A_tilde(r, i)) == 0.5);
      CHECK((sr.A_tilde(r, i) > 0) == sr.masks[r].contains(i));
    }
    CHECK(sr.b_tilde(r) == (sr.masks[r].count() >= 3 ? 1.0 : 0.0));
  }
  CHECK(!kernel_banzhaf_unpaired(g, 40, 9).regression.paired);
}

TEST_CASE("budget truthfulness: reported evals equal the counter delta") {
  for (int variant = 0; variant < 5; ++variant) {
    ThresholdGame g(6, 3);
    const std::uint64_t before = g.eval_count();
    Attribution rep;
    switch (variant) {
      case 0: rep = kernel_banzhaf(g, 20, 3).report; break;
      case 1: rep = kernel_banzhaf_unpaired(g, 20, 3).report; break;
      case 2: rep = kernel_banzhaf_swor(g, 20, 3).report; break;
      case 3: rep = mc_banzhaf(g, 20, 3); break;
      default: rep = msr_banzhaf(g, 20, 3); break;
    }
    CHECK(rep.evals == g.eval_count() - before);
    CHECK(rep.evals == (variant == 3 ? 40u : 20u));
    CHECK(rep.budget == 20);
  }
}

TEST_CASE("determinism: same seed, same game stream, identical report") {
  for (int variant = 0; variant < 2; ++variant) {
    auto make_game = [] {
      return wrap_noise(std::make_unique<ThresholdGame>(9, 4), 0.3, 5);
    };
    auto g1 = make_game();
    auto g2 = make_game();
    const auto a = variant == 0 ? kernel_banzhaf(*g1, 64, 17).report
                                : mc_banzhaf(*g1, 64, 17);
    const auto b = variant == 0 ? kernel_banzhaf(*g2, 64, 17).report
                                : mc_banzhaf(*g2, 64, 17);
    CHECK(a.values == b.values);
    // A different seed moves the estimate.
    auto g3 = make_game();
    const auto c = variant == 0 ? kernel_banzhaf(*g3, 64, 18).report
                                : mc_banzhaf(*g3, 64, 18);
    CHECK(a.values != c.values);
  }
}

TEST_CASE("paired recovery on linear games, any intercept") {
  LinearGame g({1.5, -2.0, 0.25, 4.0, 1.0, -1.0}, 3.7);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto res = kernel_banzhaf(g, 24, seed);
    if (res.report.rank == 6) {
      CHECK(max_abs_diff(res.report.values, g.weights()) < 1e-8);
    } else {
      CHECK(!res.report.flags.empty());
    }
  }
}

TEST_CASE("translation covariance under paired sampling") {
  TableGame base = random_table_game(8, 12);
  std::vector<double> shifted = base.table();
  for (auto& v : shifted) v += 11.25;
  TableGame moved(8, shifted);
  const auto a = kernel_banzhaf(base, 48, 33).report;
  const auto b = kernel_banzhaf(moved, 48, 33).report;
  CHECK(max_abs_diff(a.values, b.values) < 1e-9);
}

TEST_CASE("unpaired ablation recovers centered linear games on full-rank draws") {
  const std::vector<double> w{1.0, -1.0, 2.5, -0.5, 0.75};
  double sum = 0.0;
  for (double v : w) sum += v;
  LinearGame centered(w, -0.5 * sum);
  auto res = kernel_banzhaf_unpaired(centered, 30, 4);
  REQUIRE(res.report.rank == 5);
  CHECK(max_abs_diff(res.report.values, w) < 1e-8);
}

TEST_CASE("sampling without replacement") {
  SUBCASE("m = 2^n touches every subset exactly once and is exact") {
    TableGame g = random_table_game(8, 77);
    auto res = kernel_banzhaf_swor(g, 256, 5);
    std::vector<int> seen(256, 0);
    for (const auto& m : res.regression.masks) ++seen[m.bits];
    CHECK(std::all_of(seen.begin(), seen.end(),
                      [](int c) { return c == 1; }));
    const auto exact = exact_banzhaf(g);
    CHECK(max_abs_diff(res.report.values, exact.values) < 1e-10);
  }
  SUBCASE("pairs are distinct at any budget") {
    ThresholdGame g(10, 5);
    auto res = kernel_banzhaf_swor(g, 128, 3);
    std::vector<std::uint64_t> pair_ids;
    for (std::size_t r = 0; r < res.regression.masks.size(); r += 2) {
      pair_ids.push_back(
          std::min(res.regression.masks[r].bits,
                   res.regression.masks[r + 1].bits));
    }
    std::sort(pair_ids.begin(), pair_ids.end());
    CHECK(std::adjacent_find(pair_ids.begin(), pair_ids.end()) ==
          pair_ids.end());
  }
}

TEST_CASE("monte carlo estimator") {
  SUBCASE("n=1: the single marginal is exact") {
    TableGame g(1, {0.25, 2.0});
    const auto rep = mc_banzhaf(g, 3, 1);
    CHECK(rep.values[0] == 1.75);
    CHECK(rep.evals == 6);
  }
  SUBCASE("linear game: every draw yields the weights exactly") {
    LinearGame g({3.0, -1.0, 0.5}, 2.0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      CHECK(max_abs_diff(mc_banzhaf(g, 9, seed).values, g.weights()) <
            1e-12);
    }
  }
  SUBCASE("budget below player count is rejected") {
    ThresholdGame g(8, 4);
    CHECK_THROWS_WITH_AS(mc_banzhaf(g, 5, 1), "budget below feature count",
                         PreconditionError);
  }
  SUBCASE("noise-only variance is 2 sigma^2 / K") {
    // Linear base game: the marginal itself is constant, so the estimator
    // variance across seeds is purely the evaluation noise.
    const double sigma = 0.5;
    const int n = 4;
    const std::uint64_t m = 4 * n;  // K = 4 samples per player
    const int reps = 2000;
    double sum = 0.0, sum_sq = 0.0;
    for (int r = 0; r < reps; ++r) {
      auto g = wrap_noise(
          std::make_unique<LinearGame>(std::vector<double>{1, 2, 3, 4}),
          sigma, 1000 + r);
      const double v = mc_banzhaf(*g, m, r).values[0];
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / reps;
    const double var = sum_sq / reps - mean * mean;
    CHECK(var == doctest::Approx(2.0 * sigma * sigma / 4.0).epsilon(0.15));
  }
}

TEST_CASE("maximum sample reuse estimator") {
  SUBCASE("n=1 with both subsets sampled gives the exact marginal") {
    TableGame g(1, {1.0, 4.0});
    const auto rep = msr_banzhaf(g, 64, 2);
    CHECK(rep.flags.empty());
    CHECK(rep.values[0] == 3.0);
  }
  SUBCASE("constant game estimates zero whenever both sides are hit") {
    TableGame g(5, std::vector<double>(32, 2.5));
    const auto rep = msr_banzhaf(g, 64, 3);
    REQUIRE(rep.flags.empty());
    for (double v : rep.values) CHECK(v == 0.0);
  }
  SUBCASE("empty side falls back to zero with a flag") {
    // With m=2 over one player, both draws land on the same subset half of
    // the time, leaving the other side empty.
    TableGame g(1, {1.0, 4.0});
    bool found_flagged = false;
    for (std::uint64_t seed = 0; seed < 64 && !found_flagged; ++seed) {
      const auto r = msr_banzhaf(g, 2, seed);
      if (!r.flags.empty()) {
        found_flagged = true;
        CHECK(r.values[0] == 0.0);
      }
    }
    CHECK(found_flagged);
  }
  SUBCASE("minimum budget enforced") {
    ThresholdGame g(4, 2);
    CHECK_THROWS_AS(msr_banzhaf(g, 1, 1), PreconditionError);
  }
}

TEST_CASE("unbiasedness over seeds: estimator means approach exact values") {
  TableGame g = random_table_game(6, 31);
  const auto exact = exact_banzhaf(g);
  const int reps = 400;
  const std::uint64_t m = 48;
  std::vector<double> mc_mean(6, 0.0), msr_mean(6, 0.0);
  for (int r = 0; r < reps; ++r) {
    auto g1 = g.clone_stream(0);
    auto g2 = g.clone_stream(0);
    const auto a = mc_banzhaf(*g1, m, 1000 + r);
    const auto b = msr_banzhaf(*g2, m, 1000 + r);
    for (int i = 0; i < 6; ++i) {
      mc_mean[i] += a.values[i] / reps;
      msr_mean[i] += b.values[i] / reps;
    }
  }
  for (int i = 0; i < 6; ++i) {
    CHECK(mc_mean[i] == doctest::Approx(exact.values[i]).epsilon(0.2));
    CHECK(msr_mean[i] == doctest::Approx(exact.values[i]).epsilon(0.2));
  }
}

TEST_CASE("error decays with budget: m = 2^{n-1} beats m = 2n") {
  const int n = 8;
  TableGame g = random_table_game(n, 90);
  const auto exact = exact_banzhaf(g);
  auto median_err = [&](std::uint64_t m) {
    std::vector<double> errs;
    for (std::uint64_t seed = 0; seed < 31; ++seed) {
      auto clone = g.clone_stream(0);
      const auto rep = kernel_banzhaf(*clone, m, seed).report;
      errs.push_back(l2_sq_error(rep.values, exact.values));
    }
    std::sort(errs.begin(), errs.end());
    return errs[errs.size() / 2];
  };
  CHECK(median_err(128) < median_err(16));
}

TEST_CASE("threshold game at m=20n: paired kernel beats MC and MSR medians") {
  const int n = 8;
  ThresholdGame g(n, 4);
  const auto exact = exact_banzhaf(g);
  auto median_err = [&](auto&& run) {
    std::vector<double> errs;
    for (std::uint64_t seed = 0; seed < 51; ++seed) {
      auto clone = g.clone_stream(0);
      errs.push_back(l2_sq_error(run(*clone, seed), exact.values));
    }
    std::sort(errs.begin(), errs.end());
    return errs[errs.size() / 2];
  };
  const std::uint64_t m = 20 * n;
  const double kb = median_err([&](Game& gg, std::uint64_t s) {
    return kernel_banzhaf(gg, m, s).report.values;
  });
  const double mc = median_err([&](Game& gg, std::uint64_t s) {
    return mc_banzhaf(gg, m, s).values;
  });
  const double msr = median_err([&](Game& gg, std::uint64_t s) {
    return msr_banzhaf(gg, m, s).values;
  });
  CHECK(kb < mc);
  CHECK(kb < msr);
}

TEST_CASE("without-replacement sampling performs comparably below 2^n") {
  const int n = 12;
  ThresholdGame g(n, 6);
  const auto exact = exact_banzhaf(g, {n, 0});
  const std::uint64_t m = 20 * n;
  auto median_err = [&](bool swor) {
    std::vector<double> errs;
    for (std::uint64_t seed = 0; seed < 31; ++seed) {
      auto clone = g.clone_stream(0);
      const auto rep = swor ? kernel_banzhaf_swor(*clone, m, seed).report
                            : kernel_banzhaf(*clone, m, seed).report;
      errs.push_back(l2_sq_error(rep.values, exact.values));
    }
    std::sort(errs.begin(), errs.end());
    return errs[errs.size() / 2];
  };
  const double with = median_err(false);
  const double without = median_err(true);
  CHECK(without < 3.0 * with);
  CHECK(with < 3.0 * without);
}
