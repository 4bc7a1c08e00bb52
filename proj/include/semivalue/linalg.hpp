#pragma once

#include <Eigen/Dense>

#include "semivalue/regression.hpp"

namespace semivalue {

struct LeastSquaresResult {
  Eigen::VectorXd x;
  Eigen::Index rank = 0;
};

// Minimum-norm least squares: minimizes ||Mx - y||_2 and, among minimizers,
// ||x||_2.  Column-pivoted orthogonal factorization with an SVD fallback
// when the residual fails the orthogonality check.  Total: never throws for
// finite input.
LeastSquaresResult least_squares_minnorm(const Eigen::MatrixXd& M,
                                         const Eigen::VectorXd& y);

// Eigenvalues of a symmetric matrix, ascending.  Rejects input whose
// asymmetry exceeds 1e-10 relative to its magnitude.
Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& M);

// lambda_max / lambda_min of a symmetric PSD matrix; +infinity once
// lambda_min <= 1e-12 * lambda_max (double-precision floor).
double gram_condition(const Eigen::MatrixXd& gram);

// Condition number of K = (A^T A)^{-1/2} A~^T A~ (A^T A)^{-1/2} for the
// Banzhaf design.  A^T A is a multiple of the identity, so this reduces to
// the eigenvalue ratio of A~^T A~.
double condition_number_K(const SampledRegression& sr, int n);

// cond of G_ref^{-1/2} S G_ref^{-1/2} for a general reference Gram.
double normalized_gram_condition(const Eigen::MatrixXd& sample_gram,
                                 const Eigen::MatrixXd& reference_gram);

// || I - (4/m) A~^T A~ ||_2: how far the paired uniform sample is from
// reproducing the orthogonal geometry of the full design.  Zero at full
// enumeration.
double spectral_error(const SampledRegression& sr, int n);

}  // namespace semivalue
