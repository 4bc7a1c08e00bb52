#pragma once

// Test-only oracles, independent of the library's solve paths.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "semivalue/mask.hpp"
#include "semivalue/tree.hpp"

namespace semivalue::test_oracles {

// Min-norm least squares via Jacobi SVD pseudoinverse (the library solves
// with a complete orthogonal decomposition).
inline Eigen::VectorXd svd_minnorm(const Eigen::MatrixXd& m,
                                   const Eigen::VectorXd& y) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-12 * sv(0);
  Eigen::VectorXd inv = sv;
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    inv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * y;
}

// Single-tree partial prediction by explicit path enumeration: every leaf
// contributes its value times the product of branch weights along its path
// (1/0 for masked-in features, left_fraction/(1-left_fraction) otherwise).
inline double tree_paths_partial(const Tree& tree, int node,
                                 std::span<const double> x, SubsetMask mask,
                                 double weight) {
  const TreeNode& nd = tree.nodes[node];
  if (nd.is_leaf()) return weight * nd.value;
  double total = 0.0;
  if (mask.contains(nd.feature)) {
    const bool go_left = x[nd.feature] < nd.threshold;
    total += tree_paths_partial(tree, nd.left, x, mask, go_left ? weight : 0.0);
    total +=
        tree_paths_partial(tree, nd.right, x, mask, go_left ? 0.0 : weight);
  } else {
    total += tree_paths_partial(tree, nd.left, x, mask,
                                weight * nd.left_fraction);
    total += tree_paths_partial(tree, nd.right, x, mask,
                                weight * (1.0 - nd.left_fraction));
  }
  return total;
}

inline double ensemble_paths_partial(const TreeEnsemble& e,
                                     std::span<const double> x,
                                     SubsetMask mask) {
  double v = e.base_score;
  for (const auto& t : e.trees) v += tree_paths_partial(t, 0, x, mask, 1.0);
  return v;
}

}  // namespace semivalue::test_oracles
