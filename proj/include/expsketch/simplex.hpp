#pragma once

#include <cstddef>
#include <vector>

#include "expsketch/signal.hpp"

namespace expsketch {

enum class LpStatus { optimal, infeasible, unbounded, budget_exceeded };

const char* to_string(LpStatus status);

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-10;
  double pivot_tol = 1e-9;
  std::size_t pivot_budget = 1'000'000;
  /// Pivots without objective progress before switching to the least-index rule.
  std::size_t stall_limit = 50;
  /// Re-solve the final basis with a pivoted QR to clean up round-off.
  bool refine = true;
};

struct SimplexResult {
  LpStatus status = LpStatus::infeasible;
  Vector solution;
  double objective = 0.0;
  std::size_t pivots = 0;
  std::size_t bland_pivots = 0;
  std::vector<Index> basis;  // structural column per constraint row, -1 for redundant rows
};

/// Dense two-phase tableau simplex for: minimize c^T z subject to A z = b, z >= 0.
///
/// Phase 1 uses one artificial per row. Pricing is Dantzig's rule; after `stall_limit`
/// non-improving pivots it falls back to Bland's least-index rule until the objective moves,
/// which guarantees termination. Redundant rows are detected and dropped after phase 1.
SimplexResult solve_standard_form(const Matrix& A, const Vector& b, const Vector& c,
                                  const SimplexOptions& options = {});

}  // namespace expsketch
