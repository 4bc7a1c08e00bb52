#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace semivalue {

// Numeric tabular data: a header row of feature names, optionally one
// column held out as the regression target.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> rows;  // row-major, |row| == |feature_names|
  std::vector<double> targets;            // empty when no target column
  std::string target_name;

  int n_features() const { return static_cast<int>(feature_names.size()); }
  int n_rows() const { return static_cast<int>(rows.size()); }
  bool has_target() const { return !target_name.empty(); }
};

// Loads a CSV with a header row; all cells numeric.  When target_column is
// non-empty that column is split out into targets.
Dataset load_csv(const std::string& path, const std::string& target_column = "");

Dataset parse_csv(const std::string& text, const std::string& target_column,
                  const std::string& origin);

void save_csv(const Dataset& d, const std::string& path);

// Synthetic regression data: standard normal features, a random linear
// signal plus a few pairwise interactions, and mild observation noise.
Dataset make_synthetic_regression(int n_rows, int n_features,
                                  std::uint64_t seed);

}  // namespace semivalue
