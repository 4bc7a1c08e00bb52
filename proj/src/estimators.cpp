#include "semivalue/estimators.hpp"

#include <chrono>
#include <unordered_set>

#include "semivalue/linalg.hpp"

namespace semivalue {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_kernel_budget(int n, std::uint64_t m) {
  if (m <= static_cast<std::uint64_t>(n)) {
    throw PreconditionError("budget below feature count");
  }
  if (m % 2 != 0) {
    throw PreconditionError(
        "sample budget must be even; paired sampling fills rows in "
        "complement pairs");
  }
  if (m > subset_count(n)) {
    throw PreconditionError("budget exceeds subset count 2^n");
  }
}

// Evaluates the sampled masks in order and solves the +-1/2 least-squares
// system; shared tail of all three kernel variants.
KernelBanzhafResult finish_kernel(Game& g, std::vector<SubsetMask> masks,
                                  bool paired, std::uint64_t m,
                                  std::uint64_t seed, const char* name,
                                  Clock::time_point t0) {
  const int n = g.players();
  const auto rows = static_cast<Eigen::Index>(masks.size());
  const std::uint64_t evals_before = g.eval_count();

  SampledRegression sr;
  sr.paired = paired;
  sr.A_tilde.resize(rows, n);
  sr.b_tilde.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const SubsetMask mask = masks[r];
    sr.b_tilde(r) = g.evaluate(mask);
    for (int i = 0; i < n; ++i) {
      sr.A_tilde(r, i) = mask.contains(i) ? 0.5 : -0.5;
    }
  }
  sr.masks = std::move(masks);

  auto solved = least_squares_minnorm(sr.A_tilde, sr.b_tilde);

  KernelBanzhafResult out;
  out.report.estimator = name;
  out.report.values.assign(solved.x.data(), solved.x.data() + solved.x.size());
  out.report.budget = m;
  out.report.evals = g.eval_count() - evals_before;
  out.report.seed = seed;
  out.report.rank = static_cast<int>(solved.rank);
  if (solved.rank < n) out.report.flags.push_back("rank-deficient");
  out.report.wall_seconds = seconds_since(t0);
  out.regression = std::move(sr);
  return out;
}

}  // namespace

KernelBanzhafResult kernel_banzhaf(Game& g, std::uint64_t m,
                                   std::uint64_t seed) {
  const auto t0 = Clock::now();
  const int n = g.players();
  check_kernel_budget(n, m);

  RngStream rng(mix_seed(seed, hash_name("kernel-banzhaf")));
  std::vector<SubsetMask> masks;
  masks.reserve(m);
  for (std::uint64_t p = 0; p < m / 2; ++p) {
    const SubsetMask z = rng.next_mask(n);
    masks.push_back(z);
    masks.push_back(complement(z));
  }
  return finish_kernel(g, std::move(masks), /*paired=*/true, m, seed,
                       "kernel-banzhaf", t0);
}

KernelBanzhafResult kernel_banzhaf_unpaired(Game& g, std::uint64_t m,
                                            std::uint64_t seed) {
  const auto t0 = Clock::now();
  const int n = g.players();
  check_kernel_budget(n, m);

  RngStream rng(mix_seed(seed, hash_name("kernel-banzhaf-unpaired")));
  std::vector<SubsetMask> masks;
  masks.reserve(m);
  for (std::uint64_t r = 0; r < m; ++r) masks.push_back(rng.next_mask(n));
  return finish_kernel(g, std::move(masks), /*paired=*/false, m, seed,
                       "kernel-banzhaf-unpaired", t0);
}

KernelBanzhafResult kernel_banzhaf_swor(Game& g, std::uint64_t m,
                                        std::uint64_t seed) {
  const auto t0 = Clock::now();
  const int n = g.players();
  check_kernel_budget(n, m);

  // The pair universe is indexed by the masks with bit n-1 clear; drawing
  // pairs without replacement is a Floyd sample of m/2 distinct indices.
  // At m = 2^n this enumerates every pair, hence every subset exactly once.
  RngStream rng(mix_seed(seed, hash_name("kernel-banzhaf-swor")));
  const std::uint64_t universe = subset_count(n) / 2;
  const std::uint64_t k = m / 2;

  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(k * 2);
  std::vector<std::uint64_t> picks;
  picks.reserve(k);
  for (std::uint64_t j = universe - k; j < universe; ++j) {
    const std::uint64_t t = rng.next_below(j + 1);
    if (chosen.insert(t).second) {
      picks.push_back(t);
    } else {
      chosen.insert(j);
      picks.push_back(j);
    }
  }

  std::vector<SubsetMask> masks;
  masks.reserve(m);
  for (std::uint64_t bits : picks) {
    const SubsetMask z{bits, n};
    masks.push_back(z);
    masks.push_back(complement(z));
  }
  return finish_kernel(g, std::move(masks), /*paired=*/true, m, seed,
                       "kernel-banzhaf-swor", t0);
}

EstimateReport mc_banzhaf(Game& g, std::uint64_t m, std::uint64_t seed) {
  const auto t0 = Clock::now();
  const int n = g.players();
  if (m < static_cast<std::uint64_t>(n)) {
    throw PreconditionError("budget below feature count");
  }
  const std::uint64_t evals_before = g.eval_count();

  RngStream rng(mix_seed(seed, hash_name("mc")));
  EstimateReport rep;
  rep.estimator = "mc";
  rep.values.resize(n);

  // Round-robin allocation: player i gets ceil(m/n) samples if i < m mod n,
  // else floor(m/n), so exactly m subsets are drawn in total.
  const std::uint64_t base = m / n;
  const std::uint64_t extra = m % n;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t k = base + (static_cast<std::uint64_t>(i) < extra);
    double sum = 0.0;
    for (std::uint64_t s = 0; s < k; ++s) {
      // Uniform over subsets of the other players: n-1 random bits with a
      // hole left at position i.
      const std::uint64_t packed =
          n > 1 ? rng.next_below(subset_count(n - 1)) : 0;
      const std::uint64_t low = packed & ((std::uint64_t{1} << i) - 1);
      const std::uint64_t high = (packed >> i) << (i + 1);
      const SubsetMask without{low | high, n};
      const double v_with = g.evaluate(without.with(i));
      const double v_without = g.evaluate(without);
      sum += v_with - v_without;
    }
    rep.values[i] = sum / double(k);
  }

  rep.budget = m;
  rep.evals = g.eval_count() - evals_before;
  rep.seed = seed;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

EstimateReport msr_banzhaf(Game& g, std::uint64_t m, std::uint64_t seed) {
  const auto t0 = Clock::now();
  const int n = g.players();
  if (m < 2) throw PreconditionError("maximum sample reuse needs m >= 2");
  const std::uint64_t evals_before = g.eval_count();

  RngStream rng(mix_seed(seed, hash_name("msr")));
  std::vector<double> in_sum(n, 0.0), out_sum(n, 0.0);
  std::vector<std::uint64_t> in_count(n, 0), out_count(n, 0);
  for (std::uint64_t s = 0; s < m; ++s) {
    const SubsetMask mask = rng.next_mask(n);
    const double v = g.evaluate(mask);
    for (int i = 0; i < n; ++i) {
      if (mask.contains(i)) {
        in_sum[i] += v;
        ++in_count[i];
      } else {
        out_sum[i] += v;
        ++out_count[i];
      }
    }
  }

  EstimateReport rep;
  rep.estimator = "msr";
  rep.values.resize(n);
  for (int i = 0; i < n; ++i) {
    if (in_count[i] == 0 || out_count[i] == 0) {
      rep.values[i] = 0.0;
      rep.flags.push_back("empty-side:player=" + std::to_string(i));
    } else {
      rep.values[i] =
          in_sum[i] / double(in_count[i]) - out_sum[i] / double(out_count[i]);
    }
  }
  rep.budget = m;
  rep.evals = g.eval_count() - evals_before;
  rep.seed = seed;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

}  // namespace semivalue
