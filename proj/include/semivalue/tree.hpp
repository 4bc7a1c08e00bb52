#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "semivalue/game.hpp"
#include "semivalue/mask.hpp"

namespace semivalue {

// One node of a regression tree.  Internal nodes route on
// x[feature] < threshold (ties go right); left_fraction is the fraction of
// training rows that went left, used by the partial-feature traversal.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double left_fraction = 0.0;
  double value = 0.0;  // leaf prediction

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // node 0 is the root
};

// Additive ensemble: prediction = base_score + sum over trees.  Immutable
// after construction; safe for unrestricted concurrent reads.
struct TreeEnsemble {
  int n_features = 0;
  double base_score = 0.0;
  std::vector<Tree> trees;
};

// Root-to-leaf prediction.  Rejects NaN feature values.
double predict(const TreeEnsemble& e, std::span<const double> x);

// Prediction using only the features in the mask: at a node splitting on a
// masked-out feature both children are evaluated and blended by
// left_fraction, nullifying that feature's influence without any value
// replacement.
double predict_partial(const TreeEnsemble& e, std::span<const double> x,
                       SubsetMask features);

struct CartParams {
  int max_depth = 3;
  int n_trees = 30;
  double learning_rate = 0.1;
  int min_leaf = 1;
};

// Greedy variance-reduction CART with squared-loss gradient boosting.
// Constant targets (or no admissible split) yield single-leaf trees rather
// than an error; splits that would send every row one way are dropped.
TreeEnsemble train_cart(const std::vector<std::vector<double>>& rows,
                        const std::vector<double>& targets,
                        const CartParams& params);

double train_mse(const TreeEnsemble& e,
                 const std::vector<std::vector<double>>& rows,
                 const std::vector<double>& targets);

// JSON model format.  Schema violations are reported with the offending
// node path; save and load validate identically, so a round trip reproduces
// bit-identical predictions.
TreeEnsemble load_ensemble_json(const std::string& path);
void save_ensemble_json(const TreeEnsemble& e, const std::string& path);
TreeEnsemble ensemble_from_json_text(const std::string& text,
                                     const std::string& origin);
std::string ensemble_to_json_text(const TreeEnsemble& e);

// The tree set function: v(S) = predict_partial(ensemble, explicand, S).
// v(full) = predict(explicand); v(empty) is the cover-weighted expectation
// of the ensemble and is independent of the explicand.
class TreeGame : public Game {
 public:
  TreeGame(std::shared_ptr<const TreeEnsemble> ensemble,
           std::vector<double> explicand);

  const TreeEnsemble& ensemble() const { return *ensemble_; }

  std::unique_ptr<Game> clone_stream(std::uint64_t stream) const override;
  std::string name() const override { return "tree"; }

 protected:
  double eval_impl(SubsetMask m) override;

 private:
  std::shared_ptr<const TreeEnsemble> ensemble_;
  std::vector<double> explicand_;
};

}  // namespace semivalue
