#include "semivalue/metrics.hpp"

#include <cmath>

#include "semivalue/errors.hpp"

namespace semivalue {

double l2_sq_error(std::span<const double> est,
                   std::span<const double> exact) {
  if (est.size() != exact.size()) {
    throw PreconditionError("vector length mismatch in error metric");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double d = est[i] - exact[i];
    s += d * d;
  }
  return s;
}

Flagged normalized_l2_sq(std::span<const double> est,
                         std::span<const double> exact) {
  const double err = l2_sq_error(est, exact);
  double norm_sq = 0.0;
  for (double v : exact) norm_sq += v * v;
  if (norm_sq <= 0.0) return {err, true};
  return {err / norm_sq, false};
}

Flagged relative_objective_error(const FullRegression& fr,
                                 std::span<const double> est) {
  if (static_cast<int>(est.size()) != fr.n) {
    throw PreconditionError("estimate length differs from player count");
  }
  const Eigen::VectorXd phi =
      fr.A.colPivHouseholderQr().solve(fr.b);  // full-rank by construction
  const double opt = (fr.A * phi - fr.b).norm();
  const Eigen::Map<const Eigen::VectorXd> x(est.data(),
                                            static_cast<Eigen::Index>(
                                                est.size()));
  const double got = (fr.A * x - fr.b).norm();
  const double gap = got - opt;
  if (opt < 1e-12) return {gap, true};
  return {gap / opt, false};
}

}  // namespace semivalue
