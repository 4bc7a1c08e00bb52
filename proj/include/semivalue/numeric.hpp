#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace semivalue {

// Binomial coefficient as a double (exact up to the 2^53 mantissa limit,
// which covers every n the enumeration guards allow).
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return std::round(r);
}

// Nearest-rank percentile on an ascending-sorted vector: the value at
// 1-based index ceil(p/100 * N), clamped to [1, N].
double percentile_nearest_rank(const std::vector<double>& sorted_ascending,
                               double p);

// Shortest round-trip decimal representation (locale-free, deterministic).
// Infinities print as "inf"/"-inf".
std::string format_double(double v);

}  // namespace semivalue
