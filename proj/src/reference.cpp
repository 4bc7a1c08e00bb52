#include "semivalue/reference.hpp"

#include <cmath>

#include "semivalue/numeric.hpp"

namespace semivalue::reference {

std::vector<double> enumerate_values(Game& g) {
  const int n = g.players();
  const std::uint64_t total = subset_count(n);
  std::vector<double> values(total);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    values[mask] = g.evaluate({mask, n});
  }
  return values;
}

// Iterates subsets of the other players literally: for each player i, every
// mask over [n] \ {i} is expanded by leaving a hole at bit i.
namespace {

std::uint64_t insert_hole(std::uint64_t packed, int i) {
  const std::uint64_t low = packed & ((std::uint64_t{1} << i) - 1);
  const std::uint64_t high = (packed >> i) << (i + 1);
  return low | high;
}

}  // namespace

std::vector<double> exact_banzhaf(Game& g) {
  const int n = g.players();
  const auto values = enumerate_values(g);
  const double scale = std::ldexp(1.0, -(n - 1));

  std::vector<double> phi(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::uint64_t rest = 0; rest < subset_count(n) / 2; ++rest) {
      const std::uint64_t without = insert_hole(rest, i);
      const std::uint64_t with = without | (std::uint64_t{1} << i);
      sum += values[with] - values[without];
    }
    phi[i] = scale * sum;
  }
  return phi;
}

std::vector<double> exact_shapley(Game& g) {
  const int n = g.players();
  const auto values = enumerate_values(g);

  std::vector<double> phi(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::uint64_t rest = 0; rest < subset_count(n) / 2; ++rest) {
      const std::uint64_t without = insert_hole(rest, i);
      const std::uint64_t with = without | (std::uint64_t{1} << i);
      const int s = std::popcount(rest);
      sum += (values[with] - values[without]) / binomial(n - 1, s);
    }
    phi[i] = sum / double(n);
  }
  return phi;
}

}  // namespace semivalue::reference
