#include "semivalue/sweep.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>

#include "semivalue/estimators.hpp"
#include "semivalue/exact.hpp"
#include "semivalue/linalg.hpp"
#include "semivalue/metrics.hpp"
#include "semivalue/numeric.hpp"
#include "semivalue/shapley.hpp"

namespace semivalue {

namespace {

using Clock = std::chrono::steady_clock;

int resolve_threads(int requested) {
  return requested > 0 ? requested : omp_get_max_threads();
}

}  // namespace

EstimatorFamily estimator_family(const std::string& name) {
  if (name == "kernel-banzhaf" || name == "kernel-banzhaf-unpaired" ||
      name == "kernel-banzhaf-swor" || name == "mc" || name == "msr" ||
      name == "exact-banzhaf") {
    return EstimatorFamily::banzhaf;
  }
  if (name == "kernel-shap" || name == "leverage-shap" ||
      name == "exact-shapley") {
    return EstimatorFamily::shapley;
  }
  throw PreconditionError("unknown estimator '" + name + "'");
}

EstimatorRun run_estimator(const std::string& name, Game& g, std::uint64_t m,
                           std::uint64_t seed, int max_n) {
  EstimatorRun out;
  if (name == "kernel-banzhaf") {
    auto r = kernel_banzhaf(g, m, seed);
    out.report = std::move(r.report);
    out.banzhaf_regression = std::move(r.regression);
  } else if (name == "kernel-banzhaf-unpaired") {
    auto r = kernel_banzhaf_unpaired(g, m, seed);
    out.report = std::move(r.report);
    out.banzhaf_regression = std::move(r.regression);
  } else if (name == "kernel-banzhaf-swor") {
    auto r = kernel_banzhaf_swor(g, m, seed);
    out.report = std::move(r.report);
    out.banzhaf_regression = std::move(r.regression);
  } else if (name == "mc") {
    out.report = mc_banzhaf(g, m, seed);
  } else if (name == "msr") {
    out.report = msr_banzhaf(g, m, seed);
  } else if (name == "kernel-shap") {
    auto r = kernel_shap(g, m, seed);
    out.report = std::move(r.report);
    out.shapley_regression = std::move(r.regression);
  } else if (name == "leverage-shap") {
    auto r = leverage_shap(g, m, seed);
    out.report = std::move(r.report);
    out.shapley_regression = std::move(r.regression);
  } else if (name == "exact-banzhaf") {
    out.report = exact_banzhaf(g, {max_n, 1});
  } else if (name == "exact-shapley") {
    out.report = exact_shapley(g, {max_n, 1});
  } else {
    throw PreconditionError("unknown estimator '" + name + "'");
  }
  return out;
}

const char* to_string(SweepMetric m) {
  switch (m) {
    case SweepMetric::l2_sq:
      return "l2sq";
    case SweepMetric::normalized_l2_sq:
      return "normalized-l2sq";
    case SweepMetric::objective:
      return "objective";
    case SweepMetric::cond:
      return "cond";
    case SweepMetric::spectral:
      return "spectral";
  }
  return "?";
}

const char* to_string(SigmaMode m) {
  return m == SigmaMode::absolute ? "absolute" : "relative-output-std";
}

namespace {

struct RunResult {
  double metric = 0.0;
  double evals = 0.0;
  double seconds = 0.0;
  std::string error;
};

double run_metric(const SweepConfig& cfg, EstimatorFamily family,
                  const EstimatorRun& run, const std::vector<double>& exact,
                  const FullRegression* fr, int n) {
  switch (cfg.metric) {
    case SweepMetric::l2_sq:
      return l2_sq_error(run.report.values, exact);
    case SweepMetric::normalized_l2_sq: {
      const auto r = normalized_l2_sq(run.report.values, exact);
      if (r.flagged) {
        throw PreconditionError("normalized error undefined: zero exact vector");
      }
      return r.value;
    }
    case SweepMetric::objective:
      if (family != EstimatorFamily::banzhaf) {
        throw PreconditionError(
            "objective metric applies to Banzhaf-family estimators");
      }
      return relative_objective_error(*fr, run.report.values).value;
    case SweepMetric::cond:
      if (run.banzhaf_regression) {
        return condition_number_K(*run.banzhaf_regression, n);
      }
      if (run.shapley_regression) {
        return condition_number_shapley(*run.shapley_regression, n);
      }
      throw PreconditionError("condition metric needs a regression estimator");
    case SweepMetric::spectral:
      if (!run.banzhaf_regression) {
        throw PreconditionError(
            "spectral metric requires paired uniform sampling");
      }
      return spectral_error(*run.banzhaf_regression, n);
  }
  throw PreconditionError("unhandled metric");
}

std::uint64_t cell_run_seed(const SweepConfig& cfg, const std::string& est,
                            std::uint64_t m, double sigma, int run) {
  std::uint64_t s = cfg.base_seed;
  s = mix_seed(s, hash_name(est));
  s = mix_seed(s, m);
  s = mix_seed(s, std::bit_cast<std::uint64_t>(sigma));
  s = mix_seed(s, static_cast<std::uint64_t>(run));
  return s;
}

}  // namespace

std::vector<SweepCell> run_sweep(const Game& base, const SweepConfig& cfg) {
  if (cfg.runs < 1) throw PreconditionError("sweep needs runs >= 1");
  if (cfg.estimators.empty() || cfg.sample_sizes.empty() ||
      cfg.sigmas.empty()) {
    throw PreconditionError("sweep needs estimators, sample sizes and sigmas");
  }
  const int n = base.players();

  // Exact reference values come from the noiseless game, whatever the
  // estimators observe.
  bool need_banzhaf = false, need_shapley = false;
  const bool needs_exact = cfg.metric == SweepMetric::l2_sq ||
                           cfg.metric == SweepMetric::normalized_l2_sq;
  for (const auto& est : cfg.estimators) {
    (estimator_family(est) == EstimatorFamily::banzhaf ? need_banzhaf
                                                       : need_shapley) = true;
  }
  std::vector<double> exact_banzhaf_values, exact_shapley_values;
  FullRegression full;
  const bool needs_full = cfg.metric == SweepMetric::objective;
  double output_std = 0.0;
  {
    const auto ev = enumerate_values(base, {cfg.max_n, cfg.threads});
    if (need_banzhaf && needs_exact) {
      exact_banzhaf_values = banzhaf_from_values(ev.values, n, cfg.threads);
    }
    if (need_shapley && needs_exact) {
      exact_shapley_values = shapley_from_values(ev.values, n, cfg.threads);
    }
    if (needs_full) {
      const auto total = static_cast<Eigen::Index>(subset_count(n));
      full.n = n;
      full.A.resize(total, n);
      full.b.resize(total);
      for (Eigen::Index mask = 0; mask < total; ++mask) {
        for (int i = 0; i < n; ++i) {
          full.A(mask, i) =
              ((static_cast<std::uint64_t>(mask) >> i) & 1u) ? 0.5 : -0.5;
        }
        full.b(mask) = ev.values[static_cast<std::uint64_t>(mask)];
      }
    }
    double mean = 0.0;
    for (double v : ev.values) mean += v;
    mean /= double(ev.values.size());
    double var = 0.0;
    for (double v : ev.values) var += (v - mean) * (v - mean);
    output_std = std::sqrt(var / double(ev.values.size()));
  }

  struct CellSpec {
    std::string estimator;
    std::uint64_t m;
    double sigma;
  };
  std::vector<CellSpec> cells;
  for (const auto& est : cfg.estimators) {
    for (auto m : cfg.sample_sizes) {
      for (double sigma : cfg.sigmas) {
        cells.push_back({est, m, sigma});
      }
    }
  }

  const int runs = cfg.runs;
  const std::int64_t n_tasks = static_cast<std::int64_t>(cells.size()) * runs;
  std::vector<RunResult> results(n_tasks);

#pragma omp parallel for schedule(dynamic) \
    num_threads(resolve_threads(cfg.threads))
  for (std::int64_t task = 0; task < n_tasks; ++task) {
    const auto& cell = cells[static_cast<std::size_t>(task / runs)];
    const int run = static_cast<int>(task % runs);
    RunResult& rr = results[task];
    try {
      const std::uint64_t seed =
          cell_run_seed(cfg, cell.estimator, cell.m, cell.sigma, run);
      const double sigma_abs = cfg.sigma_mode == SigmaMode::absolute
                                   ? cell.sigma
                                   : cell.sigma * output_std;
      std::unique_ptr<Game> game =
          base.clone_stream(mix_seed(seed, hash_name("game")));
      if (sigma_abs > 0.0) {
        game = wrap_noise(std::move(game), sigma_abs,
                          mix_seed(seed, hash_name("cell-noise")));
      }
      const auto t0 = Clock::now();
      const auto family = estimator_family(cell.estimator);
      auto out = run_estimator(cell.estimator, *game, cell.m, seed, cfg.max_n);
      rr.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
      rr.evals = double(out.report.evals);
      rr.metric = run_metric(cfg, family, out,
                             family == EstimatorFamily::banzhaf
                                 ? exact_banzhaf_values
                                 : exact_shapley_values,
                             needs_full ? &full : nullptr, n);
    } catch (const std::exception& ex) {
      rr.error = ex.what();
    }
  }

  std::vector<SweepCell> out;
  out.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepCell cell;
    cell.estimator = cells[c].estimator;
    cell.m = cells[c].m;
    cell.sigma = cells[c].sigma;

    std::vector<double> metrics;
    metrics.reserve(runs);
    double eval_sum = 0.0, sec_sum = 0.0;
    for (int r = 0; r < runs; ++r) {
      const RunResult& rr = results[static_cast<std::int64_t>(c) * runs + r];
      if (!rr.error.empty()) {
        cell.error = rr.error;
        break;
      }
      metrics.push_back(rr.metric);
      eval_sum += rr.evals;
      sec_sum += rr.seconds;
    }
    if (cell.error.empty()) {
      std::sort(metrics.begin(), metrics.end());
      cell.median = percentile_nearest_rank(metrics, 50.0);
      cell.p25 = percentile_nearest_rank(metrics, 25.0);
      cell.p75 = percentile_nearest_rank(metrics, 75.0);
      cell.mean_evals = eval_sum / double(runs);
      cell.mean_seconds = sec_sum / double(runs);
    }
    out.push_back(std::move(cell));
  }
  return out;
}

std::vector<ScatterRow> scatter_export(const Game& base,
                                       const std::string& estimator,
                                       std::uint64_t m, std::uint64_t seed,
                                       int max_n) {
  const int n = base.players();
  const auto family = estimator_family(estimator);
  const auto ev = enumerate_values(base, {max_n, 0});
  const std::vector<double> exact = family == EstimatorFamily::banzhaf
                                        ? banzhaf_from_values(ev.values, n)
                                        : shapley_from_values(ev.values, n);

  auto game = base.clone_stream(mix_seed(seed, hash_name("scatter-game")));
  const auto run = run_estimator(estimator, *game, m, seed, max_n);

  double norm = 0.0;
  for (double v : exact) norm += v * v;
  norm = std::sqrt(norm);
  const double inv = norm > 0.0 ? 1.0 / norm : 0.0;

  std::vector<ScatterRow> rows(n);
  for (int i = 0; i < n; ++i) {
    rows[i] = {i, exact[i], run.report.values[i], exact[i] * inv,
               run.report.values[i] * inv};
  }
  return rows;
}

namespace {

void write_meta(std::ostream& os, const CsvMeta& meta) {
  os << "# semivalue v0.1.0\n";
  os << "# schema: " << meta.schema << "\n";
  if (!meta.config_json.empty()) os << "# config: " << meta.config_json << "\n";
}

}  // namespace

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells,
                     const CsvMeta& meta) {
  write_meta(os, meta);
  os << "estimator,m,sigma,median,p25,p75,mean_evals,mean_seconds,error\n";
  for (const auto& c : cells) {
    os << c.estimator << ',' << c.m << ',' << format_double(c.sigma) << ',';
    if (c.error.empty()) {
      os << format_double(c.median) << ',' << format_double(c.p25) << ','
         << format_double(c.p75) << ',' << format_double(c.mean_evals) << ',';
      if (meta.timings) os << format_double(c.mean_seconds);
      os << ',';
    } else {
      std::string msg = c.error;
      for (auto& ch : msg) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      os << ",,,,," << msg;
    }
    os << '\n';
  }
}

void write_scatter_csv(std::ostream& os, const std::vector<ScatterRow>& rows,
                       const CsvMeta& meta) {
  write_meta(os, meta);
  os << "feature,exact,estimate,exact_normalized,estimate_normalized\n";
  for (const auto& r : rows) {
    os << r.feature << ',' << format_double(r.exact) << ','
       << format_double(r.estimate) << ',' << format_double(r.exact_normalized)
       << ',' << format_double(r.estimate_normalized) << '\n';
  }
}

}  // namespace semivalue
