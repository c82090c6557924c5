#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <limits>
#include <random>

#include "expsketch/bipartite_graph.hpp"
#include "expsketch/expansion.hpp"
#include "expsketch/guarantees.hpp"
#include "expsketch/lp_decoder.hpp"
#include "expsketch/simplex.hpp"

using namespace expsketch;

namespace {

// Minimum of c^T z over basic feasible solutions of {Az = b, z >= 0}, by enumerating every
// choice of m columns. Assumes A has full row rank and a bounded optimum.
std::optional<double> vertex_oracle(const Matrix& A, const Vector& b, const Vector& c) {
  const Index m = A.rows(), n = A.cols();
  std::optional<double> best;
  std::vector<bool> pick(static_cast<std::size_t>(n), false);
  std::fill(pick.end() - m, pick.end(), true);
  do {
    std::vector<Index> cols;
    for (Index j = 0; j < n; ++j)
      if (pick[static_cast<std::size_t>(j)]) cols.push_back(j);
    Matrix B(m, m);
    for (Index t = 0; t < m; ++t) B.col(t) = A.col(cols[static_cast<std::size_t>(t)]);
    Eigen::FullPivLU<Matrix> lu(B);
    if (lu.rank() < m) continue;
    const Vector zb = lu.solve(b);
    if (zb.minCoeff() < -1e-9) continue;
    double value = 0.0;
    for (Index t = 0; t < m; ++t) value += c(cols[static_cast<std::size_t>(t)]) * zb(t);
    if (!best || value < *best) best = value;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace

TEST(Simplex, SmallKnownProgram) {
  // minimize -x1 - 2 x2 subject to x1 + x2 + s1 = 4, x2 + s2 = 3: optimum x = (1, 3), value -7.
  Matrix A(2, 4);
  A << 1, 1, 1, 0, 0, 1, 0, 1;
  Vector b(2);
  b << 4, 3;
  Vector c(4);
  c << -1, -2, 0, 0;
  const auto r = solve_standard_form(A, b, c);
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_NEAR(r.objective, -7.0, 1e-12);
  EXPECT_NEAR(r.solution(0), 1.0, 1e-12);
  EXPECT_NEAR(r.solution(1), 3.0, 1e-12);
}

TEST(Simplex, RandomProgramsMatchVertexEnumeration) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const Index m = 3, n = 7;
    Matrix A(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) A(i, j) = u(rng);
    Vector z0(n);
    for (Index j = 0; j < n; ++j) z0(j) = pos(rng);
    const Vector b = A * z0;
    Vector c(n);
    for (Index j = 0; j < n; ++j) c(j) = pos(rng) + 0.1;  // positive costs keep the optimum bounded
    const auto r = solve_standard_form(A, b, c);
    ASSERT_EQ(r.status, LpStatus::optimal) << "trial " << trial;
    const auto oracle = vertex_oracle(A, b, c);
    ASSERT_TRUE(oracle.has_value());
    EXPECT_NEAR(r.objective, *oracle, 1e-8) << "trial " << trial;
    EXPECT_LE((A * r.solution - b).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_GE(r.solution.minCoeff(), -1e-12);
  }
}

TEST(Simplex, BealeCyclingExampleTerminates) {
  // Beale's degenerate program; Dantzig pricing with naive ties cycles on it.
  Matrix A(3, 7);
  A << 1, 0, 0, 0.25, -8, -1, 9,  //
      0, 1, 0, 0.5, -12, -0.5, 3,  //
      0, 0, 1, 0, 0, 1, 0;
  Vector b(3);
  b << 0, 0, 1;
  Vector c(7);
  c << 0, 0, 0, -0.75, 20, -0.5, 6;
  SimplexOptions options;
  options.stall_limit = 2;
  const auto r = solve_standard_form(A, b, c, options);
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_NEAR(r.objective, -1.25, 1e-10);
  EXPECT_NEAR(r.objective, *vertex_oracle(A, b, c), 1e-10);
}

TEST(Simplex, InfeasibleUnboundedBudgetAndRedundantRows) {
  Matrix A(1, 2);
  A << 1, 1;
  Vector b(1);
  b << -1;
  EXPECT_EQ(solve_standard_form(A, b, Vector::Ones(2)).status, LpStatus::infeasible);

  Matrix U(1, 2);
  U << 1, -1;
  Vector bu(1);
  bu << 0;
  Vector cu(2);
  cu << -1, 0;
  EXPECT_EQ(solve_standard_form(U, bu, cu).status, LpStatus::unbounded);

  Matrix R(2, 3);
  R << 1, 1, 1, 2, 2, 2;  // second row duplicates the first
  Vector br(2);
  br << 1, 2;
  Vector cr(3);
  cr << 3, 1, 2;
  const auto redundant = solve_standard_form(R, br, cr);
  ASSERT_EQ(redundant.status, LpStatus::optimal);
  EXPECT_NEAR(redundant.objective, 1.0, 1e-12);

  SimplexOptions tight;
  tight.pivot_budget = 0;
  Matrix P(2, 4);
  P << 1, 1, 1, 0, 0, 1, 0, 1;
  Vector bp(2);
  bp << 4, 3;
  Vector cp(4);
  cp << -1, -2, 0, 0;
  EXPECT_EQ(solve_standard_form(P, bp, cp, tight).status, LpStatus::budget_exceeded);
  EXPECT_STREQ(to_string(LpStatus::budget_exceeded), "budget-exceeded");
  EXPECT_THROW(solve_standard_form(P, Vector::Ones(3), cp), ParameterError);
}

TEST(LpDecode, RecoversSparseSignals) {
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto phi = from_graph(sample_expander(64, 40, 6, seed));
    Vector x = Vector::Zero(64);
    std::mt19937_64 rng(seed);
    for (int t = 0; t < 3; ++t) x(static_cast<Index>(rng() % 64)) = (rng() % 2 ? 1.0 : -1.0) * (1 + rng() % 5);
    const auto s = decode(phi, apply(phi, x));
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_LE(s.residual_inf, 1e-9);
    EXPECT_LE(s.objective, x.lpNorm<1>() + 1e-9);  // x itself is feasible
    EXPECT_NEAR(s.objective, s.x_star.lpNorm<1>(), 1e-12);
    if ((s.x_star - x).cwiseAbs().maxCoeff() <= 1e-6) ++recovered;
  }
  EXPECT_GE(recovered, 19);
}

TEST(LpDecode, ZeroSketchAndErrors) {
  const auto phi = from_graph(sample_expander(10, 6, 2, 1));
  const auto zero = decode(phi, apply(phi, Vector::Zero(10)));
  ASSERT_EQ(zero.status, LpStatus::optimal);
  EXPECT_EQ(zero.x_star.lpNorm<1>(), 0.0);
  EXPECT_THROW(decode(phi, Vector::Zero(5)), ParameterError);
  Sketch foreign = apply(phi, Vector::Ones(10));
  foreign.provenance += 1;
  EXPECT_THROW(decode(phi, foreign), ParameterError);
  Sketch anonymous{apply(phi, Vector::Ones(10)).values, 0};
  EXPECT_EQ(decode(phi, anonymous).status, LpStatus::optimal);
}

TEST(Guarantee, SpreadConstantAndBoundFormulas) {
  EXPECT_EQ(spread_constant(0.0), 0.0);
  EXPECT_NEAR(spread_constant(0.125), 0.25 / 0.75, 1e-15);
  EXPECT_THROW(spread_constant(0.5), ParameterError);

  Vector x(4), xs(4);
  x << 3, -1, 0.5, 0.25;
  xs << 3, -1, 0, 0;
  const auto ev = evaluate_bound(x, xs, 2, 0.1);
  const double alpha = 0.2 / 0.8;
  EXPECT_NEAR(ev.alpha, alpha, 1e-15);
  EXPECT_NEAR(ev.lhs, 0.75, 1e-15);
  EXPECT_NEAR(ev.rhs, 2.0 / (1.0 - 2.0 * alpha) * 0.75, 1e-12);
  EXPECT_TRUE(ev.satisfied);
  EXPECT_THROW(evaluate_bound(x, xs, 2, 0.25), BoundUndefinedError);
  EXPECT_THROW(evaluate_bound(x, xs, 2, -0.1), BoundUndefinedError);

  const auto noisy = evaluate_noisy_bound(x, xs, 2, 0.1, 4, 2.0);
  EXPECT_NEAR(noisy.lhs, 0.0, 1e-15);  // x_star equals the head
  EXPECT_NEAR(noisy.rhs, 2.0 / (1 - 2 * alpha) * 0.75 + 2.0 * 2.0 / (4 * 0.8 * (1 - 2 * alpha)), 1e-12);
  EXPECT_THROW(evaluate_noisy_bound(x, xs, 2, 0.1, 4, -1.0), ParameterError);
}

TEST(Guarantee, HoldsWhereTheExpansionDefectIsSmall) {
  // A sparse, tall graph keeps pairwise overlaps small, so eps at 2k = 2 stays below 1/4.
  const auto g = sample_expander(20, 200, 8, 5);
  const double eps = check_expansion_exact(g, 2).epsilon_hat;
  ASSERT_LT(eps, 0.25);
  const auto report = check_lp_guarantee(from_graph(g), 1, eps, 40, 9);
  EXPECT_FALSE(report.inconclusive);
  EXPECT_EQ(report.instances, 40u);
  EXPECT_EQ(report.violations, 0u);
  EXPECT_EQ(report.parameters.at("solver_failures"), 0.0);
}

TEST(Guarantee, NoisyBoundOnPerturbedSketches) {
  // eta = phi mu keeps the program feasible; the bound is evaluated only when its
  // hypothesis ||x_star||_1 <= ||x||_1 holds.
  const auto g = sample_expander(20, 200, 8, 5);
  const auto phi = from_graph(g);
  const double eps = check_expansion_exact(g, 2).epsilon_hat;
  std::size_t evaluated = 0;
  for (std::uint64_t t = 0; t < 30; ++t) {
    const Vector x = compressible_signal(20, 1.5, t);
    const Vector mu = 1e-3 * compressible_signal(20, 0.5, t + 1000);
    const auto s = decode(phi, Vector(apply(phi, x).values + apply(phi, mu).values));
    ASSERT_EQ(s.status, LpStatus::optimal);
    if (s.x_star.lpNorm<1>() > x.lpNorm<1>()) continue;
    const double beta = (apply(phi, Vector(s.x_star - x)).values).lpNorm<1>();
    EXPECT_TRUE(evaluate_noisy_bound(x, s.x_star, 1, eps, 6, beta).satisfied) << "trial " << t;
    ++evaluated;
  }
  EXPECT_GT(evaluated, 0u);
}
