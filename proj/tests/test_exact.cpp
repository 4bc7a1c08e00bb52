#include "semivalue/exact.hpp"

#include <cmath>

#include "doctest.h"
#include "semivalue/linalg.hpp"
#include "semivalue/metrics.hpp"
#include "semivalue/reference.hpp"

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

TEST_CASE("exact banzhaf on reference games") {
  SUBCASE("linear game returns its weights") {
    LinearGame g({1.0, 2.0, 3.0});
    const auto a = exact_banzhaf(g);
    CHECK(max_abs_diff(a.values, {1.0, 2.0, 3.0}) < 1e-14);
    CHECK(a.evals == 8);
  }
  SUBCASE("threshold n=3 quota=2: two swings per player over four subsets") {
    ThresholdGame g(3, 2);
    const auto a = exact_banzhaf(g);
    CHECK(max_abs_diff(a.values, {0.5, 0.5, 0.5}) < 1e-15);
    auto clone = g.clone_stream(0);
    CHECK(max_abs_diff(a.values, reference::exact_banzhaf(*clone)) < 1e-15);
  }
  SUBCASE("a player the game ignores gets exactly zero") {
    // v(S) depends only on players 0..2; player 3 is null.
    TableGame inner = random_table_game(3, 8);
    std::vector<double> padded(16);
    for (std::uint64_t bits = 0; bits < 16; ++bits) {
      padded[bits] = inner.table()[bits & 7u];
    }
    TableGame g(4, padded);
    const auto a = exact_banzhaf(g);
    CHECK(std::abs(a.values[3]) <= 1e-12);
  }
}

TEST_CASE("exact shapley on reference games") {
  SUBCASE("linear game returns its weights") {
    LinearGame g({1.0, 2.0, 3.0}, -1.0);
    CHECK(max_abs_diff(exact_shapley(g).values, {1.0, 2.0, 3.0}) < 1e-14);
  }
  SUBCASE("threshold n=3 quota=2: symmetry + efficiency force thirds") {
    ThresholdGame g(3, 2);
    const auto a = exact_shapley(g);
    CHECK(max_abs_diff(a.values, {1.0 / 3, 1.0 / 3, 1.0 / 3}) < 1e-15);
  }
  SUBCASE("efficiency: values sum to v(full) - v(empty), 20 random games") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      TableGame g = random_table_game(8, seed);
      const auto a = exact_shapley(g);
      double sum = 0.0;
      for (double v : a.values) sum += v;
      const double expect = g.table()[255] - g.table()[0];
      CHECK(sum == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("parallel kernels match the serial references") {
  TableGame g = random_table_game(10, 3);
  auto c1 = g.clone_stream(0);
  auto c2 = g.clone_stream(0);
  CHECK(max_abs_diff(exact_banzhaf(g, {20, 4}).values,
                     reference::exact_banzhaf(*c1)) < 1e-12);
  CHECK(max_abs_diff(exact_shapley(g, {20, 4}).values,
                     reference::exact_shapley(*c2)) < 1e-12);
}

TEST_CASE("enumeration guard") {
  ThresholdGame g(12, 6);
  CHECK_THROWS_WITH_AS(enumerate_values(g, {10, 0}),
                       "enumeration too large: n=12 exceeds guard 10",
                       PreconditionError);
}

TEST_CASE("full regression design") {
  SUBCASE("n=2 rows in ascending mask order") {
    LinearGame g({1.0, 2.0});
    const auto fr = build_full_regression(g);
    // masks 00, 01, 10, 11; column i carries bit i mapped to +-1/2.
    Eigen::MatrixXd expect(4, 2);
    expect << -0.5, -0.5, 0.5, -0.5, -0.5, 0.5, 0.5, 0.5;
    CHECK((fr.A - expect).cwiseAbs().maxCoeff() == 0.0);
    CHECK(fr.b(0) == 0.0);
    CHECK(fr.b(3) == 3.0);
  }
  SUBCASE("gram identity and uniform leverage scores, n=6") {
    ThresholdGame g(6, 3);
    const auto fr = build_full_regression(g);
    Eigen::MatrixXd gram = fr.A.transpose() * fr.A;
    Eigen::MatrixXd expect = std::ldexp(1.0, 4) * Eigen::MatrixXd::Identity(6, 6);
    CHECK((gram - expect).cwiseAbs().maxCoeff() == 0.0);

    // Leverage of every row equals n/2^n.
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const Eigen::MatrixXd solved = ldlt.solve(fr.A.transpose());
    for (Eigen::Index r = 0; r < fr.A.rows(); ++r) {
      const double lev = fr.A.row(r) * solved.col(r);
      CHECK(lev == doctest::Approx(6.0 / 64.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("regression solution equals the marginal-sum oracle") {
  SUBCASE("random games up to n=10 within 1e-10") {
    for (int n : {4, 7, 10}) {
      TableGame g = random_table_game(n, 100 + n);
      const auto fr = build_full_regression(g);
      const auto reg = regression_banzhaf(fr);
      const auto exact = exact_banzhaf(g);
      CHECK(max_abs_diff(reg.values, exact.values) < 1e-10);
    }
  }
  SUBCASE("linear game recovers weights") {
    LinearGame g({2.0, -1.0, 0.25, 4.0}, 1.0);
    const auto reg = regression_banzhaf(build_full_regression(g));
    CHECK(max_abs_diff(reg.values, {2.0, -1.0, 0.25, 4.0}) < 1e-12);
  }
  SUBCASE("closed-form normal equations match, n=8") {
    TableGame g = random_table_game(8, 55);
    const auto fr = build_full_regression(g);
    const auto reg = regression_banzhaf(fr);
    const Eigen::VectorXd closed =
        std::ldexp(1.0, -(8 - 2)) * (fr.A.transpose() * fr.b);
    for (int i = 0; i < 8; ++i) {
      CHECK(reg.values[i] == doctest::Approx(closed(i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("gamma statistic") {
  SUBCASE("centered linear game lies in the design span") {
    // intercept = -sum(w)/2 makes the constant component vanish.
    const std::vector<double> w{1.0, -2.0, 0.5, 3.0};
    double sum = 0.0;
    for (double v : w) sum += v;
    LinearGame g(w, -0.5 * sum);
    const auto fr = build_full_regression(g);
    const auto gr = gamma_statistic(fr);
    CHECK(!gr.infinite);
    CHECK(gr.gamma <= 1e-12);
  }
  SUBCASE("constant offset c: residual is (c + sum(w)/2) * ones") {
    const std::vector<double> w{1.0, -1.0, 2.0, -2.0};  // zero-sum
    const double c = 0.7;
    const int n = 4;
    LinearGame g(w, c);
    const auto fr = build_full_regression(g);
    const auto gr = gamma_statistic(fr);
    double norm_sq = 0.0;
    for (double v : w) norm_sq += v * v;
    const double fit_sq = std::ldexp(1.0, n - 2) * norm_sq;
    CHECK(gr.gamma ==
          doctest::Approx(c * c * std::ldexp(1.0, n) / fit_sq).epsilon(1e-10));

    // Non-zero-sum weights shift the residual by sum(w)/2.
    LinearGame g2({1.0, 2.0, 3.0}, 0.0);
    const auto gr2 = gamma_statistic(build_full_regression(g2));
    const double resid = 0.0 + 0.5 * 6.0;
    const double fit2 = std::ldexp(1.0, 3 - 2) * 14.0;
    CHECK(gr2.gamma ==
          doctest::Approx(resid * resid * 8.0 / fit2).epsilon(1e-10));
  }
  SUBCASE("threshold n=3 quota=2: gamma = 5/3 by the projection identity") {
    ThresholdGame g(3, 2);
    const auto gr = gamma_statistic(build_full_regression(g));
    CHECK(gr.gamma > 0.0);
    CHECK(gr.gamma == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("all-zero game flags an infinite gamma") {
    TableGame g(3, std::vector<double>(8, 0.0));
    const auto gr = gamma_statistic(build_full_regression(g));
    CHECK(gr.infinite);
    CHECK(std::isinf(gr.gamma));
  }
  SUBCASE("streaming gamma equals the materialized one") {
    TableGame g = random_table_game(9, 77);
    const auto fr = build_full_regression(g);
    const auto a = exact_banzhaf(g);
    const auto direct = gamma_statistic(fr);
    const auto streamed = gamma_from_values(g.table(), a.values, 9);
    CHECK(streamed.gamma == doctest::Approx(direct.gamma).epsilon(1e-10));
  }
}

TEST_CASE("fit-norm identity: 2^{n-2} ||phi||^2 = ||A phi||^2") {
  TableGame g = random_table_game(7, 21);
  const auto fr = build_full_regression(g);
  const auto a = exact_banzhaf(g);
  const Eigen::Map<const Eigen::VectorXd> phi(a.values.data(), 7);
  CHECK((fr.A * phi).squaredNorm() ==
        doctest::Approx(std::ldexp(phi.squaredNorm(), 5)).epsilon(1e-12));
}

TEST_CASE("banzhaf axioms on random games") {
  SUBCASE("linearity: alpha*u + beta*w") {
    const int n = 7;
    TableGame u = random_table_game(n, 1);
    TableGame w = random_table_game(n, 2);
    std::vector<double> combo(subset_count(n));
    for (std::uint64_t bits = 0; bits < subset_count(n); ++bits) {
      combo[bits] = 2.0 * u.table()[bits] - 3.0 * w.table()[bits];
    }
    TableGame both(n, combo);
    const auto au = exact_banzhaf(u);
    const auto aw = exact_banzhaf(w);
    const auto ab = exact_banzhaf(both);
    for (int i = 0; i < n; ++i) {
      CHECK(ab.values[i] ==
            doctest::Approx(2.0 * au.values[i] - 3.0 * aw.values[i])
                .epsilon(1e-10));
    }
  }
  SUBCASE("symmetry: relabeling players relabels values") {
    const int n = 6;
    TableGame g = random_table_game(n, 3);
    const std::vector<int> perm{3, 0, 5, 1, 4, 2};
    std::vector<double> relabeled(subset_count(n));
    for (std::uint64_t bits = 0; bits < subset_count(n); ++bits) {
      // g'(S) = g(pre-image of S): player perm[i] in g' acts like i in g.
      std::uint64_t pre = 0;
      for (int i = 0; i < n; ++i) {
        if ((bits >> perm[i]) & 1u) pre |= std::uint64_t{1} << i;
      }
      relabeled[bits] = g.table()[pre];
    }
    TableGame gp(n, relabeled);
    const auto a = exact_banzhaf(g);
    const auto ap = exact_banzhaf(gp);
    for (int i = 0; i < n; ++i) {
      CHECK(ap.values[perm[i]] == doctest::Approx(a.values[i]).epsilon(1e-12));
    }
  }
  SUBCASE("two-player merge preserves the pair's total value") {
    const int n = 6;
    TableGame g = random_table_game(n, 4);
    const auto a = exact_banzhaf(g);
    // Merge players 0 and 1 into reduced player 0.
    std::vector<double> merged(subset_count(n - 1));
    for (std::uint64_t bits = 0; bits < subset_count(n - 1); ++bits) {
      std::uint64_t expanded = (bits >> 1) << 2;
      if (bits & 1u) expanded |= 0b11;
      merged[bits] = g.table()[expanded];
    }
    TableGame gm(n - 1, merged);
    const auto am = exact_banzhaf(gm);
    CHECK(am.values[0] ==
          doctest::Approx(a.values[0] + a.values[1]).epsilon(1e-12));
  }
}
