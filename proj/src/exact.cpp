#include "semivalue/exact.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>

#include "semivalue/linalg.hpp"
#include "semivalue/numeric.hpp"

namespace semivalue {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int resolve_threads(int requested) {
  return requested > 0 ? requested : omp_get_max_threads();
}

void guard_enumeration(int n, int max_n) {
  if (n > max_n) {
    throw PreconditionError("enumeration too large: n=" + std::to_string(n) +
                            " exceeds guard " + std::to_string(max_n));
  }
}

// Rethrows the first exception captured inside a parallel region.
class ErrorCollector {
 public:
  void capture() {
    std::lock_guard<std::mutex> lock(mu_);
    if (!first_) first_ = std::current_exception();
  }
  void rethrow_if_any() {
    if (first_) std::rethrow_exception(first_);
  }

 private:
  std::mutex mu_;
  std::exception_ptr first_;
};

}  // namespace

EnumeratedValues enumerate_values(const Game& g, const ExactOptions& opts) {
  const int n = g.players();
  guard_enumeration(n, opts.max_n);
  const std::uint64_t total = subset_count(n);
  const std::int64_t n_blocks =
      static_cast<std::int64_t>((total + kEnumBlock - 1) / kEnumBlock);

  EnumeratedValues out;
  out.n = n;
  out.values.resize(total);
  out.evals = total;

  // Each block runs on its own clone (stream = block index), so the table
  // is independent of the thread count and schedule.
  ErrorCollector errors;
#pragma omp parallel for schedule(dynamic) \
    num_threads(resolve_threads(opts.threads))
  for (std::int64_t b = 0; b < n_blocks; ++b) {
    try {
      auto worker = g.clone_stream(static_cast<std::uint64_t>(b));
      const std::uint64_t begin = static_cast<std::uint64_t>(b) * kEnumBlock;
      const std::uint64_t end = std::min(total, begin + kEnumBlock);
      for (std::uint64_t mask = begin; mask < end; ++mask) {
        out.values[mask] = worker->evaluate({mask, n});
      }
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow_if_any();
  return out;
}

std::vector<double> banzhaf_from_values(std::span<const double> values, int n,
                                        int threads) {
  const std::uint64_t total = subset_count(n);
  const std::int64_t n_blocks =
      static_cast<std::int64_t>((total + kEnumBlock - 1) / kEnumBlock);

  // phi_i = 2^{1-n} sum_z z_i v(z) with z_i = +-1; partial sums are kept
  // per block and reduced in block order for thread-count independence.
  std::vector<std::vector<double>> partial(n_blocks);
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
  for (std::int64_t b = 0; b < n_blocks; ++b) {
    std::vector<double> acc(n, 0.0);
    const std::uint64_t begin = static_cast<std::uint64_t>(b) * kEnumBlock;
    const std::uint64_t end = std::min(total, begin + kEnumBlock);
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      const double v = values[mask];
      for (int i = 0; i < n; ++i) {
        acc[i] += ((mask >> i) & 1u) ? v : -v;
      }
    }
    partial[b] = std::move(acc);
  }

  std::vector<double> phi(n, 0.0);
  for (const auto& acc : partial) {
    for (int i = 0; i < n; ++i) phi[i] += acc[i];
  }
  const double scale = std::ldexp(1.0, -(n - 1));
  for (auto& p : phi) p *= scale;
  return phi;
}

std::vector<double> shapley_from_values(std::span<const double> values, int n,
                                        int threads) {
  const std::uint64_t total = subset_count(n);
  const std::int64_t n_blocks =
      static_cast<std::int64_t>((total + kEnumBlock - 1) / kEnumBlock);

  // Size weights w(s) = 1/(n * C(n-1,s)).  A mask of size s contributes
  // +w(s-1) to every member and -w(s) to every non-member.
  std::vector<double> w(n);
  for (int s = 0; s < n; ++s) w[s] = 1.0 / (double(n) * binomial(n - 1, s));

  std::vector<std::vector<double>> partial(n_blocks);
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
  for (std::int64_t b = 0; b < n_blocks; ++b) {
    std::vector<double> acc(n, 0.0);
    const std::uint64_t begin = static_cast<std::uint64_t>(b) * kEnumBlock;
    const std::uint64_t end = std::min(total, begin + kEnumBlock);
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      const double v = values[mask];
      const int s = std::popcount(mask);
      const double w_in = s > 0 ? w[s - 1] : 0.0;
      const double w_out = s < n ? w[s] : 0.0;
      for (int i = 0; i < n; ++i) {
        acc[i] += ((mask >> i) & 1u) ? w_in * v : -w_out * v;
      }
    }
    partial[b] = std::move(acc);
  }

  std::vector<double> phi(n, 0.0);
  for (const auto& acc : partial) {
    for (int i = 0; i < n; ++i) phi[i] += acc[i];
  }
  return phi;
}

Attribution exact_banzhaf(const Game& g, const ExactOptions& opts) {
  const auto t0 = Clock::now();
  const auto ev = enumerate_values(g, opts);
  Attribution a;
  a.estimator = "exact-banzhaf";
  a.values = banzhaf_from_values(ev.values, ev.n, opts.threads);
  a.evals = ev.evals;
  a.wall_seconds = seconds_since(t0);
  return a;
}

Attribution exact_shapley(const Game& g, const ExactOptions& opts) {
  const auto t0 = Clock::now();
  const auto ev = enumerate_values(g, opts);
  Attribution a;
  a.estimator = "exact-shapley";
  a.values = shapley_from_values(ev.values, ev.n, opts.threads);
  a.evals = ev.evals;
  a.wall_seconds = seconds_since(t0);
  return a;
}

FullRegression build_full_regression(const Game& g, const ExactOptions& opts) {
  const auto ev = enumerate_values(g, opts);
  const int n = ev.n;
  const auto total = static_cast<Eigen::Index>(subset_count(n));

  FullRegression fr;
  fr.n = n;
  fr.A.resize(total, n);
  fr.b.resize(total);
  for (Eigen::Index mask = 0; mask < total; ++mask) {
    for (int i = 0; i < n; ++i) {
      fr.A(mask, i) = ((static_cast<std::uint64_t>(mask) >> i) & 1u) ? 0.5
                                                                     : -0.5;
    }
    fr.b(mask) = ev.values[static_cast<std::uint64_t>(mask)];
  }
  return fr;
}

Attribution regression_banzhaf(const FullRegression& fr) {
  const auto t0 = Clock::now();
  auto solved = least_squares_minnorm(fr.A, fr.b);
  Attribution a;
  a.estimator = "regression-banzhaf";
  a.values.assign(solved.x.data(), solved.x.data() + solved.x.size());
  a.evals = static_cast<std::uint64_t>(fr.b.size());
  a.rank = static_cast<int>(solved.rank);
  a.wall_seconds = seconds_since(t0);
  return a;
}

GammaResult gamma_statistic(const FullRegression& fr) {
  const Eigen::VectorXd phi = least_squares_minnorm(fr.A, fr.b).x;
  const double fit_sq = (fr.A * phi).squaredNorm();
  if (fit_sq <= 0.0) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  const double resid_sq = (fr.A * phi - fr.b).squaredNorm();
  return {resid_sq / fit_sq, false};
}

GammaResult gamma_from_values(std::span<const double> values,
                              std::span<const double> phi, int n,
                              int threads) {
  const std::uint64_t total = subset_count(n);
  const std::int64_t n_blocks =
      static_cast<std::int64_t>((total + kEnumBlock - 1) / kEnumBlock);

  std::vector<double> fit_partial(n_blocks, 0.0);
  std::vector<double> resid_partial(n_blocks, 0.0);
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
  for (std::int64_t b = 0; b < n_blocks; ++b) {
    double fit = 0.0, resid = 0.0;
    const std::uint64_t begin = static_cast<std::uint64_t>(b) * kEnumBlock;
    const std::uint64_t end = std::min(total, begin + kEnumBlock);
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      double dot = 0.0;
      for (int i = 0; i < n; ++i) {
        dot += ((mask >> i) & 1u) ? 0.5 * phi[i] : -0.5 * phi[i];
      }
      fit += dot * dot;
      const double r = dot - values[mask];
      resid += r * r;
    }
    fit_partial[b] = fit;
    resid_partial[b] = resid;
  }
  double fit_sq = 0.0, resid_sq = 0.0;
  for (std::int64_t b = 0; b < n_blocks; ++b) {
    fit_sq += fit_partial[b];
    resid_sq += resid_partial[b];
  }
  if (fit_sq <= 0.0) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  return {resid_sq / fit_sq, false};
}

}  // namespace semivalue
