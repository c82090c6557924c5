#pragma once

#include <cstddef>

#include "expsketch/simplex.hpp"
#include "expsketch/sparse_binary_matrix.hpp"

namespace expsketch {

struct LpDecoderOptions {
  /// Absolute feasibility tolerance on constraint residuals.
  double tol = 1e-9;
  std::size_t pivot_budget = 1'000'000;
};

struct LpSolution {
  Vector x_star;
  double objective = 0.0;  // ||x_star||_1
  LpStatus status = LpStatus::infeasible;
  double residual_inf = 0.0;  // max |phi x_star - y|
  std::size_t pivots = 0;
};

/// Basis pursuit: minimize ||x||_1 subject to phi x = y, solved as the split LP
/// x = x+ - x-, x+, x- >= 0, minimize 1^T (x+ + x-).
LpSolution decode(const SparseBinaryMatrix& phi, const Vector& y, const LpDecoderOptions& options = {});
LpSolution decode(const SparseBinaryMatrix& phi, const Sketch& y, const LpDecoderOptions& options = {});

/// Null-space spread constant alpha(eps) = 2 eps / (1 - 2 eps).
double spread_constant(double epsilon);

struct GuaranteeEvaluation {
  std::size_t k = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
};

/// ||x - x_star||_1 <= 2 / (1 - 2 alpha(eps)) * ||x - x_k||_1.
/// Throws BoundUndefinedError for eps >= 1/4.
GuaranteeEvaluation evaluate_bound(const Vector& x, const Vector& x_star, std::size_t k, double epsilon);

/// ||x_star - x_k||_1 <= 2 / (1 - 2 alpha) * ||x - x_k||_1 + 2 beta / (d (1 - 2 eps)(1 - 2 alpha)),
/// where beta = ||phi (x_star - x)||_1 is the l1 measurement discrepancy.
GuaranteeEvaluation evaluate_noisy_bound(const Vector& x, const Vector& x_star, std::size_t k,
                                         double epsilon, std::size_t d, double beta);

}  // namespace expsketch
