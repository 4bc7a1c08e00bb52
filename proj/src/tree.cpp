#include "semivalue/tree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "semivalue/errors.hpp"

namespace semivalue {

namespace {

void check_features(const TreeEnsemble& e, std::span<const double> x) {
  if (static_cast<int>(x.size()) != e.n_features) {
    throw PreconditionError("feature vector has " + std::to_string(x.size()) +
                            " entries, model expects " +
                            std::to_string(e.n_features));
  }
  for (double v : x) {
    if (std::isnan(v)) throw PreconditionError("NaN feature value rejected");
  }
}

double eval_tree(const Tree& t, std::span<const double> x) {
  int node = 0;
  for (;;) {
    const TreeNode& nd = t.nodes[node];
    if (nd.is_leaf()) return nd.value;
    node = x[nd.feature] < nd.threshold ? nd.left : nd.right;
  }
}

double eval_tree_partial(const Tree& t, int node, std::span<const double> x,
                         SubsetMask features) {
  const TreeNode& nd = t.nodes[node];
  if (nd.is_leaf()) return nd.value;
  if (features.contains(nd.feature)) {
    int next = x[nd.feature] < nd.threshold ? nd.left : nd.right;
    return eval_tree_partial(t, next, x, features);
  }
  return nd.left_fraction * eval_tree_partial(t, nd.left, x, features) +
         (1.0 - nd.left_fraction) * eval_tree_partial(t, nd.right, x, features);
}

}  // namespace

double predict(const TreeEnsemble& e, std::span<const double> x) {
  check_features(e, x);
  double v = e.base_score;
  for (const auto& t : e.trees) v += eval_tree(t, x);
  return v;
}

double predict_partial(const TreeEnsemble& e, std::span<const double> x,
                       SubsetMask features) {
  check_features(e, x);
  double v = e.base_score;
  for (const auto& t : e.trees) v += eval_tree_partial(t, 0, x, features);
  return v;
}

// --- training ---------------------------------------------------------

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;  // SSE reduction
};

double sum_of(const std::vector<double>& v, const std::vector<int>& idx) {
  double s = 0.0;
  for (int i : idx) s += v[i];
  return s;
}

// Best variance-reduction split over the given rows, or none.  Candidate
// thresholds are midpoints of consecutive distinct sorted values; the rule
// x < threshold routes left, so ties go right.
SplitChoice best_split(const std::vector<std::vector<double>>& rows,
                       const std::vector<double>& residual,
                       const std::vector<int>& idx, int min_leaf) {
  const int n_features = static_cast<int>(rows[0].size());
  const double total = sum_of(residual, idx);
  const int count = static_cast<int>(idx.size());

  SplitChoice best;
  std::vector<std::pair<double, double>> col(idx.size());  // (x, target)
  for (int f = 0; f < n_features; ++f) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
      col[k] = {rows[idx[k]][f], residual[idx[k]]};
    }
    std::sort(col.begin(), col.end());
    double left_sum = 0.0;
    for (int k = 0; k + 1 < count; ++k) {
      left_sum += col[k].second;
      if (col[k].first == col[k + 1].first) continue;
      const int left_count = k + 1;
      const int right_count = count - left_count;
      if (left_count < min_leaf || right_count < min_leaf) continue;
      const double right_sum = total - left_sum;
      // SSE reduction = sum_L^2/n_L + sum_R^2/n_R - total^2/n.
      const double gain = left_sum * left_sum / left_count +
                          right_sum * right_sum / right_count -
                          total * total / count;
      if (gain > best.gain + 1e-12) {
        best.feature = f;
        best.threshold = 0.5 * (col[k].first + col[k + 1].first);
        best.gain = gain;
      }
    }
  }
  return best;
}

int grow(Tree& tree, const std::vector<std::vector<double>>& rows,
         const std::vector<double>& residual, std::vector<int> idx, int depth,
         const CartParams& params) {
  const int node_id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();

  SplitChoice split;
  if (depth < params.max_depth && static_cast<int>(idx.size()) >= 2) {
    split = best_split(rows, residual, idx, params.min_leaf);
  }
  if (split.feature < 0) {
    tree.nodes[node_id].value =
        params.learning_rate * sum_of(residual, idx) / double(idx.size());
    return node_id;
  }

  std::vector<int> left_idx, right_idx;
  for (int i : idx) {
    (rows[i][split.feature] < split.threshold ? left_idx : right_idx)
        .push_back(i);
  }
  // min_leaf >= 1 guarantees both sides non-empty, hence
  // left_fraction strictly inside (0,1).
  const double lf = double(left_idx.size()) / double(idx.size());
  idx.clear();
  idx.shrink_to_fit();

  const int left = grow(tree, rows, residual, std::move(left_idx), depth + 1,
                        params);
  const int right = grow(tree, rows, residual, std::move(right_idx), depth + 1,
                         params);
  TreeNode& nd = tree.nodes[node_id];
  nd.feature = split.feature;
  nd.threshold = split.threshold;
  nd.left = left;
  nd.right = right;
  nd.left_fraction = lf;
  return node_id;
}

}  // namespace

TreeEnsemble train_cart(const std::vector<std::vector<double>>& rows,
                        const std::vector<double>& targets,
                        const CartParams& params) {
  if (rows.size() < 2) throw PreconditionError("training needs >= 2 rows");
  if (rows.size() != targets.size()) {
    throw PreconditionError("row/target count mismatch");
  }
  for (double t : targets) {
    if (!std::isfinite(t)) throw PreconditionError("non-finite target");
  }
  if (params.max_depth < 1 || params.n_trees < 0 || params.min_leaf < 1) {
    throw PreconditionError("invalid training parameters");
  }

  TreeEnsemble e;
  e.n_features = static_cast<int>(rows[0].size());
  e.base_score =
      std::accumulate(targets.begin(), targets.end(), 0.0) / targets.size();

  std::vector<double> pred(rows.size(), e.base_score);
  std::vector<int> all(rows.size());
  std::iota(all.begin(), all.end(), 0);

  for (int t = 0; t < params.n_trees; ++t) {
    std::vector<double> residual(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      residual[i] = targets[i] - pred[i];
    }
    Tree tree;
    grow(tree, rows, residual, all, 0, params);
    // A lone zero-value leaf means the residuals are exhausted.
    if (tree.nodes.size() == 1 && tree.nodes[0].value == 0.0) break;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      pred[i] += eval_tree(tree, rows[i]);
    }
    e.trees.push_back(std::move(tree));
  }
  return e;
}

double train_mse(const TreeEnsemble& e,
                 const std::vector<std::vector<double>>& rows,
                 const std::vector<double>& targets) {
  double s = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double d = predict(e, rows[i]) - targets[i];
    s += d * d;
  }
  return s / double(rows.size());
}

// --- JSON model format -------------------------------------------------
//
// {"n_features": int, "base_score": float,
//  "trees": [{"nodes": [{"feature": int, "threshold": float, "left": int,
//                        "right": int, "left_fraction": float}
//                       | {"value": float}]}]}
// Node 0 is the root of each tree.

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& origin, int tree, int node,
                               const std::string& what) {
  std::ostringstream os;
  os << origin << ": trees[" << tree << "].nodes[" << node << "]: " << what;
  throw IoError(os.str());
}

void validate_tree(const std::string& origin, int tree_idx, const Tree& tree,
                   int n_features) {
  const int count = static_cast<int>(tree.nodes.size());
  if (count == 0) {
    schema_error(origin, tree_idx, 0, "tree has no nodes");
  }
  for (int i = 0; i < count; ++i) {
    const TreeNode& nd = tree.nodes[i];
    if (nd.is_leaf()) continue;
    if (nd.feature >= n_features) {
      schema_error(origin, tree_idx, i, "feature index out of range");
    }
    if (nd.left < 0 || nd.left >= count || nd.right < 0 || nd.right >= count) {
      schema_error(origin, tree_idx, i, "child id out of range");
    }
    if (!(nd.left_fraction > 0.0 && nd.left_fraction < 1.0)) {
      schema_error(origin, tree_idx, i,
                   "left_fraction must be in (0,1), got " +
                       std::to_string(nd.left_fraction));
    }
    if (!std::isfinite(nd.threshold)) {
      schema_error(origin, tree_idx, i, "non-finite threshold");
    }
  }
  // Children must form a tree rooted at node 0: each node reached once.
  std::vector<int> seen(count, 0);
  std::vector<int> stack{0};
  int reached = 0;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    if (seen[i]++) schema_error(origin, tree_idx, i, "node reached twice");
    ++reached;
    const TreeNode& nd = tree.nodes[i];
    if (!nd.is_leaf()) {
      stack.push_back(nd.left);
      stack.push_back(nd.right);
    }
  }
  if (reached != count) {
    schema_error(origin, tree_idx, 0, "unreachable nodes present");
  }
}

void validate_ensemble(const std::string& origin, const TreeEnsemble& e) {
  if (e.n_features < 1) throw IoError(origin + ": n_features must be >= 1");
  if (!std::isfinite(e.base_score)) {
    throw IoError(origin + ": non-finite base_score");
  }
  for (int t = 0; t < static_cast<int>(e.trees.size()); ++t) {
    validate_tree(origin, t, e.trees[t], e.n_features);
  }
}

}  // namespace

TreeEnsemble ensemble_from_json_text(const std::string& text,
                                     const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw IoError(origin + ": invalid JSON: " + ex.what());
  }
  TreeEnsemble e;
  try {
    e.n_features = j.at("n_features").get<int>();
    e.base_score = j.at("base_score").get<double>();
    int ti = 0;
    for (const auto& jt : j.at("trees")) {
      Tree tree;
      int ni = 0;
      for (const auto& jn : jt.at("nodes")) {
        TreeNode nd;
        if (jn.contains("value")) {
          nd.value = jn.at("value").get<double>();
        } else {
          for (const char* key :
               {"feature", "threshold", "left", "right", "left_fraction"}) {
            if (!jn.contains(key)) {
              schema_error(origin, ti, ni,
                           std::string("missing ") + key + " field");
            }
          }
          nd.feature = jn.at("feature").get<int>();
          nd.threshold = jn.at("threshold").get<double>();
          nd.left = jn.at("left").get<int>();
          nd.right = jn.at("right").get<int>();
          nd.left_fraction = jn.at("left_fraction").get<double>();
          if (nd.feature < 0) {
            schema_error(origin, ti, ni, "negative feature index");
          }
        }
        tree.nodes.push_back(nd);
        ++ni;
      }
      e.trees.push_back(std::move(tree));
      ++ti;
    }
  } catch (const json::exception& ex) {
    throw IoError(origin + ": malformed model: " + ex.what());
  }
  validate_ensemble(origin, e);
  return e;
}

std::string ensemble_to_json_text(const TreeEnsemble& e) {
  validate_ensemble("model", e);
  json trees = json::array();
  for (const auto& t : e.trees) {
    json nodes = json::array();
    for (const auto& nd : t.nodes) {
      if (nd.is_leaf()) {
        nodes.push_back({{"value", nd.value}});
      } else {
        nodes.push_back({{"feature", nd.feature},
                         {"threshold", nd.threshold},
                         {"left", nd.left},
                         {"right", nd.right},
                         {"left_fraction", nd.left_fraction}});
      }
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  json j{{"n_features", e.n_features},
         {"base_score", e.base_score},
         {"trees", std::move(trees)}};
  return j.dump(2) + "\n";
}

TreeEnsemble load_ensemble_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ensemble_from_json_text(buf.str(), path);
}

void save_ensemble_json(const TreeEnsemble& e, const std::string& path) {
  const std::string text = ensemble_to_json_text(e);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

TreeGame::TreeGame(std::shared_ptr<const TreeEnsemble> ensemble,
                   std::vector<double> explicand)
    : Game(ensemble->n_features),
      ensemble_(std::move(ensemble)),
      explicand_(std::move(explicand)) {
  if (static_cast<int>(explicand_.size()) != ensemble_->n_features) {
    throw PreconditionError("explicand width differs from model features");
  }
}

double TreeGame::eval_impl(SubsetMask m) {
  return predict_partial(*ensemble_, explicand_, m);
}

std::unique_ptr<Game> TreeGame::clone_stream(std::uint64_t) const {
  return std::make_unique<TreeGame>(ensemble_, explicand_);
}

}  // namespace semivalue
