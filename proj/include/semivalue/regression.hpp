#pragma once

#include <Eigen/Dense>
#include <vector>

#include "semivalue/mask.hpp"

namespace semivalue {

// The subsampled Banzhaf regression (A~, b~) plus sampling metadata,
// retained for diagnostics.  Entries of A_tilde are +-1/2; when paired,
// rows 2i and 2i+1 are entrywise negations and masks 2i, 2i+1 complements.
struct SampledRegression {
  Eigen::MatrixXd A_tilde;
  Eigen::VectorXd b_tilde;
  bool paired = false;
  std::vector<SubsetMask> masks;
};

// Sampled rows of the efficiency-constrained Shapley regression.  Rows are
// masks with 0 < |S| < n; targets are v(S) - v(empty); row_weights carry
// whatever scaling the solve applies (kernel weights for full enumeration,
// importance corrections for leverage sampling, 1 for plain paired
// sampling).
struct ShapleyRegression {
  std::vector<SubsetMask> masks;
  Eigen::VectorXd targets;
  Eigen::VectorXd row_weights;
  double total = 0.0;  // v(full) - v(empty)
};

// The full 2^n-row Banzhaf design: row for mask z is z^T/2 under the
// bit=1 -> +1 mapping, in ascending mask order; b_z = v(z).
struct FullRegression {
  int n = 0;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

}  // namespace semivalue
