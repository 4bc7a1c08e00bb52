#pragma once

#include <span>

#include "semivalue/regression.hpp"

namespace semivalue {

// || est - exact ||_2^2.
double l2_sq_error(std::span<const double> est, std::span<const double> exact);

struct Flagged {
  double value = 0.0;
  bool flagged = false;
};

// || est - exact ||_2^2 / || exact ||_2^2; flagged when the exact vector is
// zero (value is the raw squared error in that case).
Flagged normalized_l2_sq(std::span<const double> est,
                         std::span<const double> exact);

// (||A est - b|| - ||A phi - b||) / ||A phi - b|| with phi the optimal
// solution; when the optimal residual is below 1e-12 the absolute gap is
// returned instead and the result is flagged.
Flagged relative_objective_error(const FullRegression& fr,
                                 std::span<const double> est);

}  // namespace semivalue
