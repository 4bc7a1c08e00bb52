#include "semivalue/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "semivalue/errors.hpp"
#include "semivalue/numeric.hpp"
#include "semivalue/rng.hpp"

namespace semivalue {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, const std::string& origin,
                  std::size_t line_no, std::size_t col) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r'))
    --end;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw IoError(origin + ":" + std::to_string(line_no) +
                  ": non-numeric cell in column " + std::to_string(col + 1) +
                  ": '" + cell + "'");
  }
  return value;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& target_column,
                  const std::string& origin) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw IoError(origin + ": empty file");

  auto header = split_line(line);
  for (auto& h : header) h = trim(h);
  if (header.empty()) throw IoError(origin + ": empty header row");

  int target_idx = -1;
  if (!target_column.empty()) {
    auto it = std::find(header.begin(), header.end(), target_column);
    if (it == header.end()) {
      throw IoError(origin + ": target column '" + target_column +
                    "' not found in header");
    }
    target_idx = static_cast<int>(it - header.begin());
  }

  Dataset d;
  d.target_name = target_column;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    if (c != target_idx) d.feature_names.push_back(header[c]);
  }

  std::size_t line_no = 1;
  while (std::getline(ss, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw IoError(origin + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(header.size()) + " cells, got " +
                    std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(d.feature_names.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = parse_cell(cells[c], origin, line_no, c);
      if (static_cast<int>(c) == target_idx) {
        d.targets.push_back(v);
      } else {
        row.push_back(v);
      }
    }
    d.rows.push_back(std::move(row));
  }
  if (d.rows.empty()) throw IoError(origin + ": no data rows");
  return d;
}

Dataset load_csv(const std::string& path, const std::string& target_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), target_column, path);
}

void save_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (std::size_t i = 0; i < d.feature_names.size(); ++i) {
    if (i) out << ',';
    out << d.feature_names[i];
  }
  if (d.has_target()) out << ',' << d.target_name;
  out << '\n';
  for (std::size_t r = 0; r < d.rows.size(); ++r) {
    for (std::size_t c = 0; c < d.rows[r].size(); ++c) {
      if (c) out << ',';
      out << format_double(d.rows[r][c]);
    }
    if (d.has_target()) out << ',' << format_double(d.targets[r]);
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

Dataset make_synthetic_regression(int n_rows, int n_features,
                                  std::uint64_t seed) {
  if (n_rows < 2 || n_features < 1) {
    throw PreconditionError("synthetic data needs >= 2 rows and >= 1 feature");
  }
  RngStream rng(mix_seed(seed, hash_name("synthetic-regression")));

  std::vector<double> coef(n_features);
  for (auto& c : coef) c = rng.next_gaussian();

  // A few pairwise interactions keep the target genuinely non-additive.
  const int n_inter = std::max(1, n_features / 2);
  struct Interaction {
    int a, b;
    double c;
  };
  std::vector<Interaction> inter;
  for (int k = 0; k < n_inter; ++k) {
    int a = static_cast<int>(rng.next_below(n_features));
    int b = static_cast<int>(rng.next_below(n_features));
    if (a == b) b = (b + 1) % n_features;
    inter.push_back({a, b, 1.5 * rng.next_gaussian()});
  }

  Dataset d;
  d.target_name = "target";
  for (int c = 0; c < n_features; ++c) {
    d.feature_names.push_back("f" + std::to_string(c));
  }
  d.rows.resize(n_rows);
  d.targets.resize(n_rows);
  for (int r = 0; r < n_rows; ++r) {
    auto& row = d.rows[r];
    row.resize(n_features);
    for (auto& x : row) x = rng.next_gaussian();
    double y = 0.0;
    for (int c = 0; c < n_features; ++c) y += coef[c] * row[c];
    for (const auto& t : inter) y += t.c * row[t.a] * row[t.b];
    d.targets[r] = y + 0.1 * rng.next_gaussian();
  }
  return d;
}

}  // namespace semivalue
