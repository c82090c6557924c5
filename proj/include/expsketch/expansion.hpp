#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "expsketch/bipartite_graph.hpp"
#include "expsketch/sparse_binary_matrix.hpp"

namespace expsketch {

/// Outcome of an expansion check: the largest defect 1 - |N(X)| / (d |X|) over examined X.
struct ExpansionReport {
  std::size_t k_tested = 0;
  double epsilon_hat = 0.0;
  std::vector<std::size_t> worst_set;
  bool exhaustive = false;
  /// Requested k exceeded n_left and was clamped.
  bool clamped = false;
  /// Enumeration stopped once the defect reached the caller's threshold; epsilon_hat is
  /// then a lower bound on the exact defect.
  bool stopped_early = false;
  std::uint64_t subsets_examined = 0;
};

struct ExhaustiveOptions {
  /// Maximum number of subsets (times sign patterns, where applicable) to enumerate.
  std::uint64_t budget = 10'000'000;
  /// Stop as soon as a set with defect >= this value is found.
  std::optional<double> stop_at;
};

/// Exact max defect over all X with 1 <= |X| <= k. Ties go to the lexicographically
/// smallest subset. Throws BudgetError when the subset count exceeds the budget.
ExpansionReport check_expansion_exact(const BipartiteGraph& g, std::size_t k,
                                      const ExhaustiveOptions& options = {});

/// Monte Carlo lower bound on the defect from `trials` random subsets (size uniform in [1, k]).
ExpansionReport check_expansion_sampled(const BipartiteGraph& g, std::size_t k, std::size_t trials,
                                        std::uint64_t seed);

/// Defect implied by RIP-1 distortion delta: (1 - 1/(1+delta)) / (2 - sqrt 2).
double epsilon_from_rip1_delta(double delta);

/// Extremes of ||phi x||_1 / (d ||x||_1) over nonzero k-sparse x.
struct Rip1Bounds {
  double lo = 1.0;
  double hi = 1.0;
  /// Distortion after rescaling the lower bound to 1: hi / lo - 1 (infinite when lo = 0).
  double delta = 0.0;
  std::vector<std::size_t> worst_support;
  std::vector<int> worst_signs;
  std::uint64_t programs_solved = 0;
};

/// Exact RIP-1 constants by solving, for every support S (|S| <= k) and sign pattern,
/// the LP minimizing ||phi x||_1 over the face {supp x in S, sign x = sigma, ||x||_1 = 1}.
/// Requires an unscaled column-regular matrix.
Rip1Bounds rip1_constant_exact(const SparseBinaryMatrix& phi, std::size_t k,
                               const ExhaustiveOptions& options = {});

/// Sum_{s=1}^{k} C(n, s) * weight^s, saturating at UINT64_MAX.
std::uint64_t subset_count(std::size_t n, std::size_t k, std::uint64_t weight = 1);

}  // namespace expsketch
