#include "semivalue/linalg.hpp"

#include <cmath>
#include <limits>

#include "semivalue/errors.hpp"

namespace semivalue {

namespace {

// Residual-orthogonality acceptance for a least-squares candidate.
bool residual_orthogonal(const Eigen::MatrixXd& M, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& x) {
  const Eigen::VectorXd r = M * x - y;
  const double lhs = (M.transpose() * r).cwiseAbs().maxCoeff();
  const double scale = M.norm() * (y.norm() + 1.0);
  return lhs <= 1e-8 * scale + 1e-300;
}

}  // namespace

LeastSquaresResult least_squares_minnorm(const Eigen::MatrixXd& M,
                                         const Eigen::VectorXd& y) {
  if (M.rows() < 1 || M.cols() < 1) {
    throw PreconditionError("least squares needs a non-empty matrix");
  }
  if (M.rows() != y.size()) {
    throw PreconditionError("matrix rows and target length differ");
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
  LeastSquaresResult res{cod.solve(y), cod.rank()};
  if (residual_orthogonal(M, y, res.x)) return res;

  // SVD fallback for pathologically scaled systems.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU |
                                            Eigen::ComputeThinV);
  res.x = svd.solve(y);
  res.rank = svd.rank();
  return res;
}

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) {
    throw PreconditionError("eigenvalues of a non-square matrix");
  }
  const double scale = M.cwiseAbs().maxCoeff();
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * (scale + 1.0)) {
    throw PreconditionError("matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigendecomposition failed");
  }
  return es.eigenvalues();
}

double gram_condition(const Eigen::MatrixXd& gram) {
  const Eigen::VectorXd ev = sym_eigenvalues(gram);
  const double lo = ev(0);
  const double hi = ev(ev.size() - 1);
  if (lo <= 1e-12 * hi || hi <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return hi / lo;
}

double condition_number_K(const SampledRegression& sr, int n) {
  if (sr.A_tilde.rows() < 1) {
    throw PreconditionError("condition number of an empty sample");
  }
  if (sr.A_tilde.cols() != n) {
    throw PreconditionError("sample width differs from player count");
  }
  // A^T A = 2^{n-2} I, so the normalization only rescales A~^T A~; the
  // eigenvalue ratio is unchanged.
  const Eigen::MatrixXd gram = sr.A_tilde.transpose() * sr.A_tilde;
  return gram_condition(gram);
}

double normalized_gram_condition(const Eigen::MatrixXd& sample_gram,
                                 const Eigen::MatrixXd& reference_gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reference_gram);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("reference Gram eigendecomposition failed");
  }
  if (es.eigenvalues()(0) <= 0.0) {
    throw PreconditionError("reference Gram is not positive definite");
  }
  const Eigen::MatrixXd inv_sqrt = es.operatorInverseSqrt();
  return gram_condition(inv_sqrt * sample_gram * inv_sqrt);
}

double spectral_error(const SampledRegression& sr, int n) {
  if (!sr.paired) {
    throw PreconditionError("spectral error requires paired uniform sampling");
  }
  const auto m = sr.A_tilde.rows();
  if (m < 1) throw PreconditionError("spectral error of an empty sample");
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(n, n) -
                      (4.0 / double(m)) * (sr.A_tilde.transpose() * sr.A_tilde);
  const Eigen::VectorXd ev = sym_eigenvalues(e);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

}  // namespace semivalue
