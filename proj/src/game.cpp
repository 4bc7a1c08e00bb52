#include "semivalue/game.hpp"

#include <unordered_set>
#include <utility>

namespace semivalue {

LinearGame::LinearGame(std::vector<double> weights, double intercept)
    : Game(static_cast<int>(weights.size())),
      weights_(std::move(weights)),
      intercept_(intercept) {}

double LinearGame::eval_impl(SubsetMask m) {
  double v = intercept_;
  for (int i = 0; i < n_; ++i) {
    if (m.contains(i)) v += weights_[i];
  }
  return v;
}

std::unique_ptr<Game> LinearGame::clone_stream(std::uint64_t) const {
  return std::make_unique<LinearGame>(weights_, intercept_);
}

ThresholdGame::ThresholdGame(int n, int quota) : Game(n), quota_(quota) {}

double ThresholdGame::eval_impl(SubsetMask m) {
  return m.count() >= quota_ ? 1.0 : 0.0;
}

std::unique_ptr<Game> ThresholdGame::clone_stream(std::uint64_t) const {
  return std::make_unique<ThresholdGame>(n_, quota_);
}

TableGame::TableGame(int n, std::vector<double> values)
    : Game(n), values_(std::move(values)) {
  if (values_.size() != subset_count(n)) {
    throw PreconditionError("value table must have 2^n entries");
  }
}

double TableGame::eval_impl(SubsetMask m) { return values_[m.bits]; }

std::unique_ptr<Game> TableGame::clone_stream(std::uint64_t) const {
  return std::make_unique<TableGame>(n_, values_);
}

TableGame random_table_game(int n, std::uint64_t seed) {
  RngStream rng(mix_seed(seed, hash_name("table-game")));
  std::vector<double> values(subset_count(n));
  for (auto& v : values) v = rng.next_gaussian();
  return TableGame(n, std::move(values));
}

NoisyGame::NoisyGame(std::unique_ptr<Game> inner, double sigma,
                     std::uint64_t seed)
    : Game(inner->players()),
      inner_(std::move(inner)),
      sigma_(sigma),
      seed_(seed),
      rng_(mix_seed(seed, hash_name("noise"))) {}

double NoisyGame::eval_impl(SubsetMask m) {
  double v = inner_->evaluate(m);
  if (sigma_ > 0.0) v += sigma_ * rng_.next_gaussian();
  return v;
}

std::string NoisyGame::name() const { return "noisy(" + inner_->name() + ")"; }

std::unique_ptr<Game> NoisyGame::clone_stream(std::uint64_t stream) const {
  return std::make_unique<NoisyGame>(inner_->clone_stream(stream), sigma_,
                                     mix_seed(seed_, stream));
}

std::unique_ptr<Game> wrap_noise(std::unique_ptr<Game> inner, double sigma,
                                 std::uint64_t seed) {
  if (!(sigma >= 0.0)) {
    throw PreconditionError("noise sigma must be non-negative");
  }
  return std::make_unique<NoisyGame>(std::move(inner), sigma, seed);
}

MaskedPredictorGame::MaskedPredictorGame(
    Predictor predictor, std::vector<double> explicand,
    std::vector<std::vector<double>> background, int k, std::uint64_t seed)
    : Game(static_cast<int>(explicand.size())),
      predictor_(std::move(predictor)),
      explicand_(std::move(explicand)) {
  if (background.empty()) throw PreconditionError("no baseline data");
  const auto rows = background.size();
  if (k < 1 || static_cast<std::size_t>(k) > rows) {
    throw PreconditionError("baseline count " + std::to_string(k) +
                            " exceeds available rows (" +
                            std::to_string(rows) + ")");
  }
  for (const auto& row : background) {
    if (row.size() != explicand_.size()) {
      throw PreconditionError("baseline row width differs from explicand");
    }
  }
  // Fixed panel: k distinct rows chosen once (Floyd), reused for every mask.
  RngStream rng(mix_seed(seed, hash_name("baseline-panel")));
  std::unordered_set<std::uint64_t> chosen;
  std::vector<std::uint64_t> order;
  for (std::uint64_t j = rows - static_cast<std::uint64_t>(k); j < rows; ++j) {
    std::uint64_t t = rng.next_below(j + 1);
    if (chosen.insert(t).second) {
      order.push_back(t);
    } else {
      chosen.insert(j);
      order.push_back(j);
    }
  }
  panel_.reserve(order.size());
  for (auto idx : order) panel_.push_back(background[idx]);
}

double MaskedPredictorGame::eval_impl(SubsetMask m) {
  std::vector<double> x(explicand_.size());
  double acc = 0.0;
  for (const auto& baseline : panel_) {
    for (int i = 0; i < n_; ++i) {
      x[i] = m.contains(i) ? explicand_[i] : baseline[i];
    }
    acc += predictor_(x);
  }
  return acc / double(panel_.size());
}

std::unique_ptr<Game> MaskedPredictorGame::clone_stream(std::uint64_t) const {
  // The panel is part of the game's identity; clones share it by value.
  auto copy = std::unique_ptr<MaskedPredictorGame>(
      new MaskedPredictorGame(*this));
  return copy;
}

}  // namespace semivalue
