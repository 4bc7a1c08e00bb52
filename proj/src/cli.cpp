#include "semivalue/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <list>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "semivalue/dataset.hpp"
#include "semivalue/estimators.hpp"
#include "semivalue/exact.hpp"
#include "semivalue/game.hpp"
#include "semivalue/metrics.hpp"
#include "semivalue/numeric.hpp"
#include "semivalue/shapley.hpp"
#include "semivalue/sweep.hpp"
#include "semivalue/tree.hpp"
#include "semivalue/version.hpp"

namespace semivalue {

namespace {

using nlohmann::json;

// Usage-level mistakes (conflicting flags, malformed lists): exit code 2.
class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- JSON config files ---------------------------------------------------
//
// Flat {"flag-name": value} objects per subcommand; arrays become repeated
// inputs.  Applied after parsing, so the command line always wins.

std::string config_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void apply_json_config(CLI::App* cmd, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    throw IoError("invalid JSON in config '" + path + "': " + ex.what());
  }
  if (!j.is_object()) {
    throw IoError("config root must be a JSON object: " + path);
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "config") continue;
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw UsageError("unknown config key '" + key + "' for subcommand '" +
                       cmd->get_name() + "'");
    }
    if (opt->count() > 0) continue;  // set on the command line
    const json& v = it.value();
    if (v.is_array()) {
      for (const auto& e : v) opt->add_result(config_scalar(e));
    } else {
      opt->add_result(config_scalar(v));
    }
    opt->run_callback();
  }
}

// --- small parsing helpers ------------------------------------------------

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(s);
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) out.push_back(cell);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s,
                                      const std::string& flag) {
  std::vector<double> out;
  for (const auto& cell : split_commas(s)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw UsageError("cannot parse '" + cell + "' in " + flag);
    }
  }
  if (out.empty()) throw UsageError(flag + " must be a non-empty list");
  return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& s,
                                          const std::string& flag) {
  std::vector<std::uint64_t> out;
  for (const auto& cell : split_commas(s)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw UsageError("cannot parse '" + cell + "' in " + flag);
    }
  }
  if (out.empty()) throw UsageError(flag + " must be a non-empty list");
  return out;
}

std::uint64_t default_base_seed() {
  if (const char* env = std::getenv("SEMIVALUE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("SEMIVALUE_SEED must be an unsigned integer");
    }
  }
  return 42;
}

json tool_meta() {
  return json{{"name", kToolName}, {"version", kToolVersion}};
}

void emit_text(const std::string& text, const std::string& out_path,
               std::ostream& stdout_stream) {
  if (out_path.empty()) {
    stdout_stream << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + out_path + "'");
  f << text;
  if (!f) throw IoError("write failed for '" + out_path + "'");
}

json values_json(const std::vector<double>& v) {
  return json(v);
}

// --- game construction ----------------------------------------------------

struct GameOptions {
  std::string game = "linear";
  std::string weights;
  double intercept = 0.0;
  int n = 0;
  int quota = 0;
  std::string model;
  std::string data;
  std::string target;
  int explicand_index = 0;
  int baselines = kDefaultBaselines;
  std::uint64_t game_seed = 1;
};

void add_game_options(CLI::App* cmd, GameOptions& go) {
  cmd->add_option("--game", go.game,
                  "Set function: linear | threshold | tree | masked")
      ->default_val("linear");
  cmd->add_option("--weights", go.weights,
                  "Comma-separated player weights (linear game)");
  cmd->add_option("--intercept", go.intercept,
                  "Additive constant of the linear game")
      ->default_val(0.0);
  cmd->add_option("--n", go.n, "Player count (threshold game)");
  cmd->add_option("--quota", go.quota,
                  "Winning coalition size (threshold game)");
  cmd->add_option("--model", go.model, "Tree-ensemble model JSON");
  cmd->add_option("--data", go.data, "CSV dataset (header row, numeric)");
  cmd->add_option("--target", go.target,
                  "Name of the target column to exclude from features");
  cmd->add_option("--explicand-index", go.explicand_index,
                  "Row index of the observation to explain")
      ->default_val(0);
  cmd->add_option("--baselines", go.baselines,
                  "Baseline panel size for the masked game")
      ->default_val(kDefaultBaselines);
  cmd->add_option("--game-seed", go.game_seed,
                  "Seed for the masked game's baseline panel")
      ->default_val(std::uint64_t{1});
}

struct BuiltGame {
  std::unique_ptr<Game> game;
  json config;
};

BuiltGame build_game(const GameOptions& go) {
  const bool wants_files = go.game == "tree" || go.game == "masked";
  if (!wants_files && (!go.model.empty() || !go.data.empty())) {
    throw UsageError("conflicting game sources: --model/--data with --game " +
                     go.game);
  }
  if (wants_files && !go.weights.empty()) {
    throw UsageError("conflicting game sources: --weights with --game " +
                     go.game);
  }

  BuiltGame out;
  out.config["game"] = go.game;

  if (go.game == "linear") {
    if (go.weights.empty()) throw UsageError("linear game needs --weights");
    auto w = parse_double_list(go.weights, "--weights");
    out.config["weights"] = w;
    out.config["intercept"] = go.intercept;
    out.game = std::make_unique<LinearGame>(std::move(w), go.intercept);
    return out;
  }
  if (go.game == "threshold") {
    if (go.n < 1) throw UsageError("threshold game needs --n");
    out.config["n"] = go.n;
    out.config["quota"] = go.quota;
    out.game = std::make_unique<ThresholdGame>(go.n, go.quota);
    return out;
  }
  if (go.game == "tree" || go.game == "masked") {
    if (go.model.empty() || go.data.empty()) {
      throw UsageError("--game " + go.game + " needs --model and --data");
    }
    auto ensemble =
        std::make_shared<const TreeEnsemble>(load_ensemble_json(go.model));
    Dataset d = load_csv(go.data, go.target);
    if (d.n_features() != ensemble->n_features) {
      throw PreconditionError("dataset has " + std::to_string(d.n_features()) +
                              " features, model expects " +
                              std::to_string(ensemble->n_features));
    }
    if (go.explicand_index < 0 || go.explicand_index >= d.n_rows()) {
      throw PreconditionError("explicand index out of range");
    }
    out.config["model"] = go.model;
    out.config["data"] = go.data;
    out.config["explicand_index"] = go.explicand_index;
    if (!go.target.empty()) out.config["target"] = go.target;

    std::vector<double> explicand = d.rows[go.explicand_index];
    if (go.game == "tree") {
      out.game = std::make_unique<TreeGame>(std::move(ensemble),
                                            std::move(explicand));
      return out;
    }
    // Masked game: baselines are every row except the explicand's.
    std::vector<std::vector<double>> background;
    background.reserve(d.rows.size());
    for (int r = 0; r < d.n_rows(); ++r) {
      if (r != go.explicand_index) background.push_back(d.rows[r]);
    }
    out.config["baselines"] = go.baselines;
    out.config["game_seed"] = go.game_seed;
    auto predictor = [ensemble](const std::vector<double>& x) {
      return predict(*ensemble, x);
    };
    out.game = std::make_unique<MaskedPredictorGame>(
        std::move(predictor), std::move(explicand), std::move(background),
        go.baselines, go.game_seed);
    return out;
  }
  throw UsageError("unknown --game '" + go.game + "'");
}

// --- subcommand state -------------------------------------------------------

struct CommonOut {
  std::string out_path;
  bool timings = false;
};

void add_common_out(CLI::App* cmd, CommonOut& c) {
  cmd->add_option("--out", c.out_path, "Write output to a file instead of stdout");
  cmd->add_flag("--timings", c.timings,
                "Include wall-clock fields (forfeits byte-identical reruns)");
}

struct ConfigSlot {
  CLI::App* cmd = nullptr;
  std::string path;
};

struct ExactArgs {
  GameOptions game;
  CommonOut out;
  std::string semivalue = "banzhaf";
  int max_n = 20;
  int threads = 0;
};

struct AttributeArgs {
  GameOptions game;
  CommonOut out;
  std::string estimator = "kernel-banzhaf";
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double noise_sigma = 0.0;
  std::string dump_regression;
  int max_n = 20;
};

struct SweepArgs {
  GameOptions game;
  CommonOut out;
  std::string estimators = "kernel-banzhaf,mc,msr";
  std::string samples_list;
  std::string sigmas = "0";
  std::string sigma_mode = "absolute";
  std::string metric = "l2sq";
  int runs = 50;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int max_n = 20;
  int threads = 0;
};

struct ScatterArgs {
  GameOptions game;
  CommonOut out;
  std::string estimator = "kernel-banzhaf";
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int max_n = 20;
};

struct DiagArgs {
  GameOptions game;
  CommonOut out;
  std::string metric = "cond";
  std::string estimator = "kernel-banzhaf";
  std::string samples_list;
  int runs = 50;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int max_n = 20;
  int threads = 0;
};

struct TrainArgs {
  std::string data;
  std::string target;
  std::string out_model;
  CartParams params;
};

std::uint64_t resolve_seed(std::uint64_t seed, bool given) {
  return given ? seed : default_base_seed();
}

SweepMetric parse_metric(const std::string& s) {
  if (s == "l2sq") return SweepMetric::l2_sq;
  if (s == "normalized-l2sq") return SweepMetric::normalized_l2_sq;
  if (s == "objective") return SweepMetric::objective;
  if (s == "cond") return SweepMetric::cond;
  if (s == "spectral") return SweepMetric::spectral;
  throw UsageError("unknown metric '" + s + "'");
}

SigmaMode parse_sigma_mode(const std::string& s) {
  if (s == "absolute") return SigmaMode::absolute;
  if (s == "relative") return SigmaMode::relative_output_std;
  throw UsageError("unknown sigma mode '" + s + "' (absolute|relative)");
}

// --- subcommand bodies ------------------------------------------------------

int cmd_exact(const ExactArgs& a, std::ostream& out) {
  if (a.semivalue != "banzhaf" && a.semivalue != "shapley") {
    throw UsageError("--semivalue must be banzhaf or shapley");
  }
  auto built = build_game(a.game);
  const int n = built.game->players();
  const ExactOptions opts{a.max_n, a.threads};

  const auto t0 = std::chrono::steady_clock::now();
  const auto ev = enumerate_values(*built.game, opts);
  const auto banzhaf = banzhaf_from_values(ev.values, n, a.threads);
  const std::vector<double> values =
      a.semivalue == "shapley" ? shapley_from_values(ev.values, n, a.threads)
                               : banzhaf;
  const auto g = gamma_from_values(ev.values, banzhaf, n, a.threads);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  json config = built.config;
  config["semivalue"] = a.semivalue;
  config["max_n"] = a.max_n;

  json j;
  j["tool"] = tool_meta();
  j["config"] = config;
  j["n"] = n;
  j["semivalue"] = a.semivalue;
  j["values"] = values_json(values);
  j["gamma"] = g.infinite ? json(nullptr) : json(g.gamma);
  j["gamma_infinite"] = g.infinite;
  j["evals"] = ev.evals;
  j["seconds"] = a.out.timings ? json(seconds) : json(nullptr);
  emit_text(j.dump(2) + "\n", a.out.out_path, out);
  return 0;
}

json report_json(const Attribution& rep, const json& config, bool timings) {
  json j;
  j["tool"] = tool_meta();
  j["config"] = config;
  j["estimator"] = rep.estimator;
  j["n"] = rep.values.size();
  j["values"] = values_json(rep.values);
  j["samples"] = rep.budget;
  j["evals"] = rep.evals;
  j["seed"] = rep.seed;
  j["rank"] = rep.rank >= 0 ? json(rep.rank) : json(nullptr);
  j["flags"] = rep.flags;
  j["wall_seconds"] = timings ? json(rep.wall_seconds) : json(nullptr);
  return j;
}

void dump_regression_csv(const EstimatorRun& run, const std::string& path,
                         const json& config) {
  std::ostringstream os;
  os << "# " << kToolName << " v" << kToolVersion << "\n";
  if (run.banzhaf_regression) {
    const auto& sr = *run.banzhaf_regression;
    os << "# schema: regression-v1 (paired=" << (sr.paired ? "1" : "0")
       << ")\n# config: " << config.dump() << "\n";
    const int n = static_cast<int>(sr.A_tilde.cols());
    os << "mask,b";
    for (int i = 0; i < n; ++i) os << ",a" << i;
    os << "\n";
    for (Eigen::Index r = 0; r < sr.A_tilde.rows(); ++r) {
      os << sr.masks[r].bits << ',' << format_double(sr.b_tilde(r));
      for (int i = 0; i < n; ++i) os << ',' << format_double(sr.A_tilde(r, i));
      os << "\n";
    }
  } else if (run.shapley_regression) {
    const auto& sr = *run.shapley_regression;
    os << "# schema: shapley-regression-v1 (total="
       << format_double(sr.total) << ")\n# config: " << config.dump() << "\n";
    os << "mask,weight,target\n";
    for (std::size_t r = 0; r < sr.masks.size(); ++r) {
      os << sr.masks[r].bits << ','
         << format_double(sr.row_weights(static_cast<Eigen::Index>(r))) << ','
         << format_double(sr.targets(static_cast<Eigen::Index>(r))) << "\n";
    }
  } else {
    throw PreconditionError("estimator '" + run.report.estimator +
                            "' has no sampled regression to dump");
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << os.str();
}

int cmd_attribute(const AttributeArgs& a, std::ostream& out) {
  if (a.samples == 0 && a.estimator.rfind("exact", 0) != 0) {
    throw UsageError("--samples is required");
  }
  auto built = build_game(a.game);
  const std::uint64_t seed = resolve_seed(a.seed, a.seed_given);

  std::unique_ptr<Game> game = std::move(built.game);
  if (a.noise_sigma != 0.0) {
    game = wrap_noise(std::move(game), a.noise_sigma,
                      mix_seed(seed, hash_name("attribute-noise")));
  }

  json config = built.config;
  config["estimator"] = a.estimator;
  config["samples"] = a.samples;
  config["seed"] = seed;
  config["noise_sigma"] = a.noise_sigma;
  config["max_n"] = a.max_n;

  auto run = run_estimator(a.estimator, *game, a.samples, seed, a.max_n);
  if (!a.dump_regression.empty()) {
    dump_regression_csv(run, a.dump_regression, config);
  }
  emit_text(report_json(run.report, config, a.out.timings).dump(2) + "\n",
            a.out.out_path, out);
  return 0;
}

json sweep_config_json(const SweepArgs& a, const json& game_config,
                       const SweepConfig& cfg) {
  json config = game_config;
  config["estimators"] = cfg.estimators;
  config["samples_list"] = cfg.sample_sizes;
  config["sigmas"] = cfg.sigmas;
  config["sigma_mode"] = to_string(cfg.sigma_mode);
  config["metric"] = to_string(cfg.metric);
  config["runs"] = cfg.runs;
  config["seed"] = cfg.base_seed;
  config["max_n"] = cfg.max_n;
  return config;
}

int cmd_sweep(const SweepArgs& a, SweepMetric default_metric,
              std::ostream& out) {
  auto built = build_game(a.game);

  SweepConfig cfg;
  cfg.estimators = split_commas(a.estimators);
  if (cfg.estimators.empty()) throw UsageError("--estimators is empty");
  if (a.samples_list.empty()) throw UsageError("--samples-list is required");
  cfg.sample_sizes = parse_u64_list(a.samples_list, "--samples-list");
  cfg.sigmas = parse_double_list(a.sigmas, "--sigmas");
  cfg.sigma_mode = parse_sigma_mode(a.sigma_mode);
  cfg.metric = a.metric.empty() ? default_metric : parse_metric(a.metric);
  cfg.runs = a.runs;
  cfg.base_seed = resolve_seed(a.seed, a.seed_given);
  cfg.max_n = a.max_n;
  cfg.threads = a.threads;

  const auto cells = run_sweep(*built.game, cfg);

  CsvMeta meta;
  meta.schema =
      "sweep-v1 columns: estimator,m,sigma,median,p25,p75,mean_evals,"
      "mean_seconds,error; metric=" +
      std::string(to_string(cfg.metric));
  meta.config_json = sweep_config_json(a, built.config, cfg).dump();
  meta.timings = a.out.timings;

  std::ostringstream os;
  write_sweep_csv(os, cells, meta);
  emit_text(os.str(), a.out.out_path, out);
  return 0;
}

int cmd_scatter(const ScatterArgs& a, std::ostream& out) {
  if (a.samples == 0 && a.estimator.rfind("exact", 0) != 0) {
    throw UsageError("--samples is required");
  }
  auto built = build_game(a.game);
  const std::uint64_t seed = resolve_seed(a.seed, a.seed_given);
  const auto rows =
      scatter_export(*built.game, a.estimator, a.samples, seed, a.max_n);

  json config = built.config;
  config["estimator"] = a.estimator;
  config["samples"] = a.samples;
  config["seed"] = seed;
  config["max_n"] = a.max_n;

  CsvMeta meta;
  meta.schema =
      "scatter-v1 columns: feature,exact,estimate,exact_normalized,"
      "estimate_normalized";
  meta.config_json = config.dump();
  meta.timings = a.out.timings;

  std::ostringstream os;
  write_scatter_csv(os, rows, meta);
  emit_text(os.str(), a.out.out_path, out);
  return 0;
}

int cmd_diag(const DiagArgs& a, std::ostream& out) {
  auto built = build_game(a.game);
  const SweepMetric metric = parse_metric(a.metric);
  if (metric != SweepMetric::cond && metric != SweepMetric::spectral) {
    throw UsageError("--metric must be cond or spectral");
  }
  if (metric == SweepMetric::spectral && a.estimator != "kernel-banzhaf" &&
      a.estimator != "kernel-banzhaf-swor") {
    throw PreconditionError(
        "spectral metric requires paired uniform sampling "
        "(kernel-banzhaf or kernel-banzhaf-swor)");
  }

  SweepConfig cfg;
  cfg.estimators = {a.estimator};
  if (a.samples_list.empty()) throw UsageError("--samples-list is required");
  cfg.sample_sizes = parse_u64_list(a.samples_list, "--samples-list");
  cfg.sigmas = {0.0};
  cfg.metric = metric;
  cfg.runs = a.runs;
  cfg.base_seed = resolve_seed(a.seed, a.seed_given);
  cfg.max_n = a.max_n;
  cfg.threads = a.threads;

  const auto cells = run_sweep(*built.game, cfg);
  for (const auto& c : cells) {
    if (!c.error.empty()) throw PreconditionError(c.error);
  }

  json config = built.config;
  config["metric"] = a.metric;
  config["estimator"] = a.estimator;
  config["samples_list"] = cfg.sample_sizes;
  config["runs"] = cfg.runs;
  config["seed"] = cfg.base_seed;
  config["max_n"] = cfg.max_n;

  std::ostringstream os;
  os << "# " << kToolName << " v" << kToolVersion << "\n";
  os << "# schema: diag-v1 columns: m,median,p25,p75; metric=" << a.metric
     << "\n";
  os << "# config: " << config.dump() << "\n";
  os << "m,median,p25,p75\n";
  for (const auto& c : cells) {
    os << c.m << ',' << format_double(c.median) << ',' << format_double(c.p25)
       << ',' << format_double(c.p75) << "\n";
  }
  emit_text(os.str(), a.out.out_path, out);
  return 0;
}

int cmd_train_tree(const TrainArgs& a, std::ostream& out) {
  if (a.data.empty()) throw UsageError("--data is required");
  if (a.target.empty()) throw UsageError("--target is required");
  if (a.out_model.empty()) throw UsageError("--out is required");
  Dataset d = load_csv(a.data, a.target);
  TreeEnsemble e = train_cart(d.rows, d.targets, a.params);
  save_ensemble_json(e, a.out_model);

  json config{{"data", a.data},
              {"target", a.target},
              {"out", a.out_model},
              {"trees", a.params.n_trees},
              {"max_depth", a.params.max_depth},
              {"learning_rate", a.params.learning_rate},
              {"min_leaf", a.params.min_leaf}};
  json j;
  j["tool"] = tool_meta();
  j["config"] = config;
  j["n_features"] = e.n_features;
  j["n_trees"] = e.trees.size();
  j["base_score"] = e.base_score;
  j["train_mse"] = train_mse(e, d.rows, d.targets);
  out << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Banzhaf and Shapley value estimation for arbitrary set "
               "functions: exact oracles, regression and Monte Carlo "
               "estimators, and a benchmark harness"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::list<ConfigSlot> config_slots;
  const auto attach_config = [&config_slots](CLI::App* cmd) {
    config_slots.push_back({cmd, {}});
    cmd->add_option("--config", config_slots.back().path,
                    "JSON config file with the same fields; flags override");
  };

  // train-tree
  TrainArgs train;
  auto* t = app.add_subcommand("train-tree",
                               "Train a boosted CART regression ensemble and "
                               "save it as model JSON");
  t->add_option("--data", train.data, "Training CSV");
  t->add_option("--target", train.target, "Target column name");
  t->add_option("--out", train.out_model, "Output model path");
  t->add_option("--trees", train.params.n_trees, "Number of boosting rounds")
      ->default_val(30);
  t->add_option("--max-depth", train.params.max_depth, "Maximum tree depth")
      ->default_val(3);
  t->add_option("--learning-rate", train.params.learning_rate,
                "Shrinkage per round")
      ->default_val(0.1);
  t->add_option("--min-leaf", train.params.min_leaf,
                "Minimum training rows per leaf")
      ->default_val(1);
  attach_config(t);

  // exact
  ExactArgs exact;
  auto* e = app.add_subcommand(
      "exact", "Exact semivalues by full enumeration, plus the relative "
               "residual gamma of the induced regression");
  add_game_options(e, exact.game);
  e->add_option("--semivalue", exact.semivalue, "banzhaf | shapley")
      ->default_val("banzhaf");
  e->add_option("--max-n", exact.max_n, "Enumeration guard (2^n evaluations)")
      ->default_val(20);
  e->add_option("--threads", exact.threads, "Worker cap (0 = all cores)")
      ->default_val(0);
  add_common_out(e, exact.out);
  attach_config(e);

  // attribute
  AttributeArgs attr;
  auto* at = app.add_subcommand("attribute",
                                "Estimate attributions with one estimator");
  add_game_options(at, attr.game);
  at->add_option("--estimator", attr.estimator,
                 "kernel-banzhaf | kernel-banzhaf-unpaired | "
                 "kernel-banzhaf-swor | mc | msr | kernel-shap | "
                 "leverage-shap | exact-banzhaf | exact-shapley")
      ->default_val("kernel-banzhaf");
  at->add_option("--samples", attr.samples, "Sample budget m (subsets)");
  auto* seed_opt =
      at->add_option("--seed", attr.seed, "Base seed (default: "
                                          "SEMIVALUE_SEED env or 42)");
  at->add_option("--noise-sigma", attr.noise_sigma,
                 "Std. dev. of Gaussian noise added per evaluation")
      ->default_val(0.0);
  at->add_option("--dump-regression", attr.dump_regression,
                 "Write the sampled regression as CSV to this path");
  at->add_option("--max-n", attr.max_n,
                 "Enumeration guard for exact estimators")
      ->default_val(20);
  add_common_out(at, attr.out);
  attach_config(at);

  // bench
  auto* b = app.add_subcommand("bench",
                               "Accuracy / noise / conditioning sweeps "
                               "(aggregated CSV)");
  b->require_subcommand(1);

  SweepArgs sweep_samples;
  auto* bs = b->add_subcommand("sweep-samples",
                               "Error percentiles across sample sizes");
  SweepArgs sweep_noise;
  auto* bn = b->add_subcommand("sweep-noise",
                               "Error percentiles across noise levels");
  SweepArgs sweep_cond;
  auto* bc = b->add_subcommand("condition",
                               "Condition number of the sampled regression "
                               "across sample sizes");
  auto add_sweep_options = [&](CLI::App* cmd, SweepArgs& sa,
                               const char* default_metric) {
    add_game_options(cmd, sa.game);
    cmd->add_option("--estimators", sa.estimators,
                    "Comma-separated estimator names")
        ->default_val("kernel-banzhaf,mc,msr");
    cmd->add_option("--samples-list", sa.samples_list,
                    "Comma-separated sample budgets");
    cmd->add_option("--sigmas", sa.sigmas, "Comma-separated noise levels")
        ->default_val("0");
    cmd->add_option("--sigma-mode", sa.sigma_mode,
                    "absolute | relative (fraction of the game's output std)")
        ->default_val("absolute");
    cmd->add_option("--metric", sa.metric,
                    "l2sq | normalized-l2sq | objective | cond | spectral")
        ->default_val(default_metric);
    cmd->add_option("--runs", sa.runs, "Runs per cell")->default_val(50);
    cmd->add_option("--seed", sa.seed, "Base seed");
    cmd->add_option("--max-n", sa.max_n, "Enumeration guard")->default_val(20);
    cmd->add_option("--threads", sa.threads, "Work-pool cap (0 = all cores)")
        ->default_val(0);
    add_common_out(cmd, sa.out);
    attach_config(cmd);
  };
  add_sweep_options(bs, sweep_samples, "l2sq");
  add_sweep_options(bn, sweep_noise, "l2sq");
  add_sweep_options(bc, sweep_cond, "cond");

  ScatterArgs scatter;
  auto* bsc = b->add_subcommand(
      "scatter", "Exact vs estimated values for one run, one row per player");
  add_game_options(bsc, scatter.game);
  bsc->add_option("--estimator", scatter.estimator, "Estimator name")
      ->default_val("kernel-banzhaf");
  bsc->add_option("--samples", scatter.samples, "Sample budget m");
  auto* scatter_seed = bsc->add_option("--seed", scatter.seed, "Base seed");
  bsc->add_option("--max-n", scatter.max_n, "Enumeration guard")
      ->default_val(20);
  add_common_out(bsc, scatter.out);
  attach_config(bsc);

  // diag
  DiagArgs diag;
  auto* dg = app.add_subcommand(
      "diag", "Sampling diagnostics (condition number / spectral deviation) "
              "across sample sizes");
  add_game_options(dg, diag.game);
  dg->add_option("--metric", diag.metric, "cond | spectral")
      ->default_val("cond");
  dg->add_option("--estimator", diag.estimator, "Regression estimator name")
      ->default_val("kernel-banzhaf");
  dg->add_option("--samples-list", diag.samples_list,
                 "Comma-separated sample budgets");
  dg->add_option("--runs", diag.runs, "Runs per sample size")->default_val(50);
  auto* diag_seed = dg->add_option("--seed", diag.seed, "Base seed");
  dg->add_option("--max-n", diag.max_n, "Enumeration guard")->default_val(20);
  dg->add_option("--threads", diag.threads, "Work-pool cap (0 = all cores)")
      ->default_val(0);
  add_common_out(dg, diag.out);
  attach_config(dg);

  // Sweep seeds need presence tracking too.
  auto* bs_seed = bs->get_option("--seed");
  auto* bn_seed = bn->get_option("--seed");
  auto* bc_seed = bc->get_option("--seed");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back(kToolName);
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  }

  try {
    for (const auto& slot : config_slots) {
      if (slot.cmd->parsed() && !slot.path.empty()) {
        apply_json_config(slot.cmd, slot.path);
      }
    }
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  } catch (const IoError& ex) {
    err << "error: " << ex.what() << "\n";
    return 4;
  }

  attr.seed_given = seed_opt->count() > 0;
  scatter.seed_given = scatter_seed->count() > 0;
  diag.seed_given = diag_seed->count() > 0;
  sweep_samples.seed_given = bs_seed->count() > 0;
  sweep_noise.seed_given = bn_seed->count() > 0;
  sweep_cond.seed_given = bc_seed->count() > 0;

  try {
    if (t->parsed()) return cmd_train_tree(train, out);
    if (e->parsed()) return cmd_exact(exact, out);
    if (at->parsed()) return cmd_attribute(attr, out);
    if (b->parsed()) {
      if (bs->parsed()) return cmd_sweep(sweep_samples, SweepMetric::l2_sq, out);
      if (bn->parsed()) return cmd_sweep(sweep_noise, SweepMetric::l2_sq, out);
      if (bc->parsed()) return cmd_sweep(sweep_cond, SweepMetric::cond, out);
      if (bsc->parsed()) return cmd_scatter(scatter, out);
    }
    if (dg->parsed()) return cmd_diag(diag, out);
    err << "error: no subcommand\n";
    return 2;
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  } catch (const PreconditionError& ex) {
    err << "error: " << ex.what() << "\n";
    return 3;
  } catch (const IoError& ex) {
    err << "error: " << ex.what() << "\n";
    return 4;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
}

}  // namespace semivalue
