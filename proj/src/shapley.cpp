#include "semivalue/shapley.hpp"

#include <chrono>
#include <cmath>

#include "semivalue/linalg.hpp"
#include "semivalue/numeric.hpp"

namespace semivalue {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_shapley_dims(int n) {
  if (n < 2) {
    throw PreconditionError(
        "constrained Shapley regression needs at least 2 players");
  }
}

// Inverse-CDF draw from an explicit discrete distribution over sizes
// 1..n-1 (index s-1).
int draw_size(RngStream& rng, const std::vector<double>& cumulative) {
  const double u = rng.next_unit() * cumulative.back();
  const auto it =
      std::lower_bound(cumulative.begin(), cumulative.end(), u);
  const int idx = static_cast<int>(it - cumulative.begin());
  return std::min(idx, static_cast<int>(cumulative.size()) - 1) + 1;
}

// Uniform subset of exactly `size` players out of n (Floyd).
SubsetMask draw_subset_of_size(RngStream& rng, int n, int size) {
  std::uint64_t bits = 0;
  for (int j = n - size; j < n; ++j) {
    const int t = static_cast<int>(rng.next_below(j + 1));
    const std::uint64_t bit = std::uint64_t{1} << t;
    if (bits & bit) {
      bits |= std::uint64_t{1} << j;
    } else {
      bits |= bit;
    }
  }
  return {bits, n};
}

struct GramEntries {
  double diag;      // sum_s C(n-1,s-1) w(s)
  double off_diag;  // sum_s C(n-2,s-2) w(s)
};

GramEntries kernel_gram_entries(int n) {
  GramEntries ge{0.0, 0.0};
  for (int s = 1; s <= n - 1; ++s) {
    const double w = shapley_kernel_weight(n, s);
    ge.diag += binomial(n - 1, s - 1) * w;
    if (s >= 2) ge.off_diag += binomial(n - 2, s - 2) * w;
  }
  return ge;
}

}  // namespace

double shapley_kernel_weight(int n, int s) {
  if (s < 1 || s > n - 1) {
    throw PreconditionError("kernel weight undefined for coalition size " +
                            std::to_string(s));
  }
  return double(n - 1) / (binomial(n, s) * double(s) * double(n - s));
}

std::vector<double> shapley_leverage_scores(int n) {
  check_shapley_dims(n);
  const auto ge = kernel_gram_entries(n);

  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(n, n, ge.off_diag);
  g.diagonal().setConstant(ge.diag);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(g);

  std::vector<double> scores(n - 1);
  for (int s = 1; s <= n - 1; ++s) {
    // By symmetry the leverage depends only on |z|; any representative works.
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    z.head(s).setOnes();
    scores[s - 1] = shapley_kernel_weight(n, s) * z.dot(ldlt.solve(z));
  }
  return scores;
}

Eigen::MatrixXd shapley_reduced_gram(int n) {
  check_shapley_dims(n);
  const auto ge = kernel_gram_entries(n);
  // Eliminating the last coordinate maps row z to (z_i - z_last)_{i<n-1};
  // the population Gram becomes (d-o) * (I + ones).
  const double d_minus_o = ge.diag - ge.off_diag;
  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(n - 1, n - 1, d_minus_o);
  g.diagonal().setConstant(2.0 * d_minus_o);
  return g;
}

ShapleySolveResult solve_shapley_regression(const ShapleyRegression& reg,
                                            int n) {
  check_shapley_dims(n);
  const auto rows = static_cast<Eigen::Index>(reg.masks.size());
  if (rows < 1) throw PreconditionError("empty Shapley regression");

  Eigen::MatrixXd m(rows, n - 1);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const SubsetMask mask = reg.masks[r];
    const double sw = std::sqrt(reg.row_weights(r));
    const double z_last = mask.contains(n - 1) ? 1.0 : 0.0;
    for (int i = 0; i < n - 1; ++i) {
      const double z_i = mask.contains(i) ? 1.0 : 0.0;
      m(r, i) = sw * (z_i - z_last);
    }
    rhs(r) = sw * (reg.targets(r) - z_last * reg.total);
  }

  auto solved = least_squares_minnorm(m, rhs);

  ShapleySolveResult out;
  out.rank = solved.rank;
  out.singular = solved.rank < n - 1;
  out.values.resize(n);
  double partial = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    out.values[i] = solved.x(i);
    partial += solved.x(i);
  }
  // The efficiency constraint holds exactly by construction.
  out.values[n - 1] = reg.total - partial;
  return out;
}

double condition_number_shapley(const ShapleyRegression& reg, int n) {
  check_shapley_dims(n);
  const auto rows = static_cast<Eigen::Index>(reg.masks.size());
  if (rows < 1) throw PreconditionError("empty Shapley regression");

  Eigen::MatrixXd m(rows, n - 1);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const SubsetMask mask = reg.masks[r];
    const double sw = std::sqrt(reg.row_weights(r));
    const double z_last = mask.contains(n - 1) ? 1.0 : 0.0;
    for (int i = 0; i < n - 1; ++i) {
      const double z_i = mask.contains(i) ? 1.0 : 0.0;
      m(r, i) = sw * (z_i - z_last);
    }
  }
  return normalized_gram_condition(m.transpose() * m,
                                   shapley_reduced_gram(n));
}

namespace {

// Shared paired-sampling pipeline: size distribution and per-row weights
// parameterized by the caller.
ShapleyEstimateResult run_shapley_sampler(
    Game& g, std::uint64_t m, std::uint64_t seed, const char* name,
    const std::vector<double>& size_weights,
    const std::vector<double>& row_weight_by_size) {
  const auto t0 = Clock::now();
  const int n = g.players();
  check_shapley_dims(n);
  if (m % 2 != 0) {
    throw PreconditionError("sample budget must be even for paired sampling");
  }
  if (m < static_cast<std::uint64_t>(n) + 2) {
    throw PreconditionError("budget below feature count");
  }
  const std::uint64_t evals_before = g.eval_count();
  RngStream rng(mix_seed(seed, hash_name(name)));

  std::vector<double> cumulative(size_weights);
  for (std::size_t i = 1; i < cumulative.size(); ++i) {
    cumulative[i] += cumulative[i - 1];
  }

  // Anchor evaluations pin the constraint.
  const double v_empty = g.evaluate(empty_mask(n));
  const double v_full = g.evaluate(full_mask(n));

  ShapleyRegression reg;
  reg.total = v_full - v_empty;
  reg.masks.reserve(m);
  reg.targets.resize(m);
  reg.row_weights.resize(m);

  for (std::uint64_t p = 0; p < m / 2; ++p) {
    const int s = draw_size(rng, cumulative);
    const SubsetMask z = draw_subset_of_size(rng, n, s);
    const SubsetMask zc = complement(z);
    const auto r = static_cast<Eigen::Index>(2 * p);
    reg.masks.push_back(z);
    reg.targets(r) = g.evaluate(z) - v_empty;
    reg.row_weights(r) = row_weight_by_size[s - 1];
    reg.masks.push_back(zc);
    reg.targets(r + 1) = g.evaluate(zc) - v_empty;
    reg.row_weights(r + 1) = row_weight_by_size[n - s - 1];
  }

  auto solved = solve_shapley_regression(reg, n);

  ShapleyEstimateResult out;
  out.report.estimator = name;
  out.report.values = std::move(solved.values);
  out.report.budget = m;
  out.report.evals = g.eval_count() - evals_before;
  out.report.seed = seed;
  out.report.rank = static_cast<int>(solved.rank);
  if (solved.singular) out.report.flags.push_back("singular-reduced-system");
  out.report.wall_seconds = seconds_since(t0);
  out.regression = std::move(reg);
  return out;
}

}  // namespace

ShapleyEstimateResult kernel_shap(Game& g, std::uint64_t m,
                                  std::uint64_t seed) {
  const int n = g.players();
  check_shapley_dims(n);
  // P(size = s) proportional to C(n,s) w(s); drawing the subset uniformly
  // within its size class makes each subset's probability proportional to
  // its kernel weight, so the sampled rows solve the weighted problem
  // unweighted.
  std::vector<double> size_weights(n - 1);
  for (int s = 1; s <= n - 1; ++s) {
    size_weights[s - 1] = binomial(n, s) * shapley_kernel_weight(n, s);
  }
  const std::vector<double> unit(n - 1, 1.0);
  return run_shapley_sampler(g, m, seed, "kernel-shap", size_weights, unit);
}

ShapleyEstimateResult leverage_shap(Game& g, std::uint64_t m,
                                    std::uint64_t seed) {
  const int n = g.players();
  check_shapley_dims(n);
  const auto leverage = shapley_leverage_scores(n);

  std::vector<double> size_weights(n - 1);
  double total_mass = 0.0;
  for (int s = 1; s <= n - 1; ++s) {
    size_weights[s - 1] = binomial(n, s) * leverage[s - 1];
    total_mass += size_weights[s - 1];
  }
  // Importance correction by the probability that the row lands in the
  // sample.  A subset enters either drawn directly or as the mate of its
  // complement, so that probability is (l(s) + l(n-s)) / sum C(n,s) l(s),
  // symmetric in s by construction.  Correcting by it keeps the sampled
  // Gram an unbiased estimate of the kernel-weighted one.
  std::vector<double> row_weights(n - 1);
  for (int s = 1; s <= n - 1; ++s) {
    const double q = (leverage[s - 1] + leverage[n - s - 1]) / total_mass;
    row_weights[s - 1] = shapley_kernel_weight(n, s) / q;
  }
  return run_shapley_sampler(g, m, seed, "leverage-shap", size_weights,
                             row_weights);
}

ShapleyEstimateResult shapley_full_regression(Game& g, int max_n,
                                              const char* estimator_name) {
  const auto t0 = Clock::now();
  const int n = g.players();
  check_shapley_dims(n);
  if (n > max_n) {
    throw PreconditionError("enumeration too large: n=" + std::to_string(n) +
                            " exceeds guard " + std::to_string(max_n));
  }
  const std::uint64_t evals_before = g.eval_count();

  const double v_empty = g.evaluate(empty_mask(n));
  const double v_full = g.evaluate(full_mask(n));

  const std::uint64_t total = subset_count(n);
  ShapleyRegression reg;
  reg.total = v_full - v_empty;
  reg.masks.reserve(total - 2);
  std::vector<double> targets, weights;
  targets.reserve(total - 2);
  weights.reserve(total - 2);
  for (std::uint64_t bits = 1; bits + 1 < total; ++bits) {
    const SubsetMask mask{bits, n};
    reg.masks.push_back(mask);
    targets.push_back(g.evaluate(mask) - v_empty);
    weights.push_back(shapley_kernel_weight(n, mask.count()));
  }
  reg.targets = Eigen::Map<Eigen::VectorXd>(targets.data(), targets.size());
  reg.row_weights = Eigen::Map<Eigen::VectorXd>(weights.data(),
                                                weights.size());

  auto solved = solve_shapley_regression(reg, n);

  ShapleyEstimateResult out;
  out.report.estimator = estimator_name;
  out.report.values = std::move(solved.values);
  out.report.budget = total - 2;
  out.report.evals = g.eval_count() - evals_before;
  out.report.rank = static_cast<int>(solved.rank);
  if (solved.singular) out.report.flags.push_back("singular-reduced-system");
  out.report.wall_seconds = seconds_since(t0);
  out.regression = std::move(reg);
  return out;
}

}  // namespace semivalue
