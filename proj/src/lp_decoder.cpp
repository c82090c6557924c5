#include "expsketch/lp_decoder.hpp"

#include <cmath>
#include <string>

namespace expsketch {
namespace {

constexpr double kSatisfiedSlack = 1e-9;

void require_meaningful(double epsilon) {
  if (!(epsilon >= 0.0) || !(epsilon < 0.25))
    throw BoundUndefinedError("recovery bound needs 0 <= epsilon < 1/4, got " + std::to_string(epsilon));
}

}  // namespace

LpSolution decode(const SparseBinaryMatrix& phi, const Vector& y, const LpDecoderOptions& options) {
  require(static_cast<std::size_t>(y.size()) == phi.rows(),
          "sketch length " + std::to_string(y.size()) + " does not match " +
              std::to_string(phi.rows()) + " rows");
  const Index m = static_cast<Index>(phi.rows());
  const Index n = static_cast<Index>(phi.cols());
  const Matrix dense = to_dense(phi);
  Matrix A(m, 2 * n);
  A.leftCols(n) = dense;
  A.rightCols(n) = -dense;

  SimplexOptions simplex;
  simplex.feasibility_tol = options.tol;
  simplex.pivot_budget = options.pivot_budget;
  const auto lp = solve_standard_form(A, y, Vector::Ones(2 * n), simplex);

  LpSolution out;
  out.status = lp.status;
  out.pivots = lp.pivots;
  out.x_star = lp.solution.head(n) - lp.solution.tail(n);
  out.objective = out.x_star.lpNorm<1>();
  out.residual_inf = m == 0 ? 0.0 : (dense * out.x_star - y).cwiseAbs().maxCoeff();
  if (out.status == LpStatus::optimal && out.residual_inf > options.tol)
    out.status = LpStatus::infeasible;
  return out;
}

LpSolution decode(const SparseBinaryMatrix& phi, const Sketch& y, const LpDecoderOptions& options) {
  require(y.provenance == 0 || y.provenance == phi.fingerprint(),
          "sketch was not produced by this matrix");
  return decode(phi, y.values, options);
}

double spread_constant(double epsilon) {
  require(epsilon >= 0.0 && epsilon < 0.5, "spread constant needs 0 <= epsilon < 1/2");
  return 2.0 * epsilon / (1.0 - 2.0 * epsilon);
}

GuaranteeEvaluation evaluate_bound(const Vector& x, const Vector& x_star, std::size_t k, double epsilon) {
  require(x.size() == x_star.size(), "signal and estimate lengths differ");
  require_meaningful(epsilon);
  GuaranteeEvaluation ev;
  ev.k = k;
  ev.epsilon = epsilon;
  ev.alpha = spread_constant(epsilon);
  ev.lhs = (x - x_star).lpNorm<1>();
  ev.rhs = 2.0 / (1.0 - 2.0 * ev.alpha) * tail(x, k).lpNorm<1>();
  ev.satisfied = ev.lhs <= ev.rhs + kSatisfiedSlack;
  return ev;
}

GuaranteeEvaluation evaluate_noisy_bound(const Vector& x, const Vector& x_star, std::size_t k,
                                         double epsilon, std::size_t d, double beta) {
  require(x.size() == x_star.size(), "signal and estimate lengths differ");
  require(beta >= 0.0, "noise level beta must be non-negative");
  require(d >= 1, "degree must be positive");
  require_meaningful(epsilon);
  GuaranteeEvaluation ev;
  ev.k = k;
  ev.epsilon = epsilon;
  ev.alpha = spread_constant(epsilon);
  const double prefactor = 1.0 - 2.0 * ev.alpha;
  ev.lhs = (x_star - head(x, k)).lpNorm<1>();
  ev.rhs = 2.0 / prefactor * tail(x, k).lpNorm<1>() +
           2.0 * beta / (static_cast<double>(d) * (1.0 - 2.0 * epsilon) * prefactor);
  ev.satisfied = ev.lhs <= ev.rhs + kSatisfiedSlack;
  return ev;
}

}  // namespace expsketch
