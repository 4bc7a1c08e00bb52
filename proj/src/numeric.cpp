#include "semivalue/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "semivalue/errors.hpp"

namespace semivalue {

double percentile_nearest_rank(const std::vector<double>& sorted_ascending,
                               double p) {
  if (sorted_ascending.empty()) {
    throw PreconditionError("percentile of empty sample");
  }
  const auto n = sorted_ascending.size();
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * double(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted_ascending[rank - 1];
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

}  // namespace semivalue
