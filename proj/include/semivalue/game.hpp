#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "semivalue/errors.hpp"
#include "semivalue/mask.hpp"
#include "semivalue/rng.hpp"

namespace semivalue {

// A per-player value vector plus the provenance needed to reproduce it.
struct Attribution {
  std::string estimator;
  std::vector<double> values;
  std::uint64_t budget = 0;  // sampled subsets (0 for exact oracles)
  std::uint64_t evals = 0;   // set-function evaluations actually spent
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  int rank = -1;  // least-squares rank; -1 when not applicable
  std::vector<std::string> flags;
};

// A set function v: 2^[n] -> R with an evaluation counter.
//
// A single instance is single-threaded.  Parallel callers clone:
// clone_stream(k) returns a fresh instance (eval count 0) whose internal
// random stream, if any, is derived from (own seed, k), so workers never
// share mutable state.
class Game {
 public:
  virtual ~Game() = default;

  int players() const { return n_; }

  double evaluate(SubsetMask m) {
    ++eval_count_;
    return eval_impl(m);
  }

  std::uint64_t eval_count() const { return eval_count_; }

  virtual std::unique_ptr<Game> clone_stream(std::uint64_t stream) const = 0;
  virtual std::string name() const = 0;

 protected:
  explicit Game(int n) : n_(n) {
    if (n < 1 || n > kMaxPlayers) {
      throw PreconditionError("player count must be in [1, 63], got " +
                              std::to_string(n));
    }
  }

  // Copies are fresh instances: the evaluation counter starts at zero.
  Game(const Game& other) : n_(other.n_) {}
  Game& operator=(const Game&) = delete;

  virtual double eval_impl(SubsetMask m) = 0;

  int n_;

 private:
  std::uint64_t eval_count_ = 0;
};

// v(S) = intercept + sum of weights over S.  Every marginal contribution of
// player i equals weights[i], so exact Banzhaf = exact Shapley = weights.
class LinearGame : public Game {
 public:
  explicit LinearGame(std::vector<double> weights, double intercept = 0.0);

  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }

  std::unique_ptr<Game> clone_stream(std::uint64_t stream) const override;
  std::string name() const override { return "linear"; }

 protected:
  double eval_impl(SubsetMask m) override;

 private:
  std::vector<double> weights_;
  double intercept_;
};

// Voting game: v(S) = 1 iff |S| >= quota.
class ThresholdGame : public Game {
 public:
  ThresholdGame(int n, int quota);

  int quota() const { return quota_; }

  std::unique_ptr<Game> clone_stream(std::uint64_t stream) const override;
  std::string name() const override { return "threshold"; }

 protected:
  double eval_impl(SubsetMask m) override;

 private:
  int quota_;
};

// Explicit value table over all 2^n subsets, indexed by mask bits.
class TableGame : public Game {
 public:
  TableGame(int n, std::vector<double> values);

  const std::vector<double>& table() const { return values_; }

  std::unique_ptr<Game> clone_stream(std::uint64_t stream) const override;
  std::string name() const override { return "table"; }

 protected:
  double eval_impl(SubsetMask m) override;

 private:
  std::vector<double> values_;
};

// Table game with i.i.d. standard normal values.
TableGame random_table_game(int n, std::uint64_t seed);

// Observes inner(S) + x with x ~ N(0, sigma) drawn fresh per evaluate call
// (not per distinct subset), so two calls on the same mask see independent
// noise.
class NoisyGame : public Game {
 public:
  NoisyGame(std::unique_ptr<Game> inner, double sigma, std::uint64_t seed);

  double sigma() const { return sigma_; }

  std::unique_ptr<Game> clone_stream(std::uint64_t stream) const override;
  std::string name() const override;

 protected:
  double eval_impl(SubsetMask m) override;

 private:
  std::unique_ptr<Game> inner_;
  double sigma_;
  std::uint64_t seed_;
  RngStream rng_;
};

// Validates sigma >= 0 and wraps.
std::unique_ptr<Game> wrap_noise(std::unique_ptr<Game> inner, double sigma,
                                 std::uint64_t seed);

// Feature-attribution game for an opaque predictor: features in S take the
// explicand's values, the rest come from a fixed panel of k baseline rows
// sampled once at construction; v(S) is the mean prediction over the panel.
class MaskedPredictorGame : public Game {
 public:
  using Predictor = std::function<double(const std::vector<double>&)>;

  MaskedPredictorGame(Predictor predictor, std::vector<double> explicand,
                      std::vector<std::vector<double>> background, int k,
                      std::uint64_t seed);

  const std::vector<std::vector<double>>& panel() const { return panel_; }

  std::unique_ptr<Game> clone_stream(std::uint64_t stream) const override;
  std::string name() const override { return "masked"; }

 protected:
  double eval_impl(SubsetMask m) override;

 private:
  Predictor predictor_;
  std::vector<double> explicand_;
  std::vector<std::vector<double>> panel_;
};

inline constexpr int kDefaultBaselines = 50;

}  // namespace semivalue
