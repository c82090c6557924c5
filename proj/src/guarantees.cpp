#include "expsketch/guarantees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "expsketch/kernel.hpp"
#include "expsketch/lp_decoder.hpp"
#include "expsketch/random.hpp"

namespace expsketch {

void CheckReport::record(double lhs, double rhs, double slack) { record_margin(lhs - rhs - slack); }

void CheckReport::record_margin(double margin) {
  ++instances;
  if (margin > 0.0) ++violations;
  worst_margin = std::max(worst_margin, margin);
}

CheckReport merge(const CheckReport& a, const CheckReport& b) {
  require(a.name == b.name && a.hard == b.hard, "can only merge reports of the same checker");
  CheckReport out = a;
  out.instances += b.instances;
  out.violations += b.violations;
  out.worst_margin = std::max(a.worst_margin, b.worst_margin);
  out.inconclusive = a.inconclusive && b.inconclusive;
  return out;
}

CollisionDecomposition collision_mass(const BipartiteGraph& g, const Vector& x) {
  require(static_cast<std::size_t>(x.size()) == g.n_left(), "signal length does not match the graph");
  CollisionDecomposition out;
  out.hits.assign(g.m_right(), 0);
  for (Index i = 0; i < x.size(); ++i)
    if (x(i) != 0.0) out.order.push_back(static_cast<std::size_t>(i));
  std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(x(static_cast<Index>(a))) > std::abs(x(static_cast<Index>(b)));
  });
  for (std::size_t i : out.order) {
    const double mass = std::abs(x(static_cast<Index>(i)));
    for (Vertex j : g.neighbors(i)) {
      (out.hits[j]++ > 0 ? out.collision_mass : out.first_hit_mass) += mass;
    }
  }
  return out;
}

CheckReport check_collision_mass(const BipartiteGraph& g, std::size_t k, double epsilon_hat,
                                 std::size_t trials, std::uint64_t seed) {
  require(k >= 1 && k <= g.n_left(), "sparsity out of range");
  CheckReport report;
  report.name = "collision_mass";
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> size(1, k);
  std::uniform_int_distribution<int> value(1, 20);
  std::bernoulli_distribution sign(0.5);
  std::size_t identity_failures = 0;
  const double d = static_cast<double>(g.degree());
  for (std::size_t t = 0; t < trials; ++t) {
    Vector x = Vector::Zero(static_cast<Index>(g.n_left()));
    for (auto i : sample_without_replacement(static_cast<std::uint32_t>(g.n_left()),
                                             static_cast<std::uint32_t>(size(rng)), rng))
      x(i) = (sign(rng) ? 1.0 : -1.0) * value(rng);
    const auto cd = collision_mass(g, x);
    const double l1 = x.lpNorm<1>();
    if (cd.collision_mass + cd.first_hit_mass != d * l1) {
      ++identity_failures;
      report.record_margin(std::abs(cd.collision_mass + cd.first_hit_mass - d * l1));
    }
    report.record(cd.collision_mass, epsilon_hat * d * l1, 1e-9);
  }
  report.parameters = {{"n", double(g.n_left())}, {"m", double(g.m_right())},
                       {"d", d},                  {"k", double(k)},
                       {"epsilon_hat", epsilon_hat}, {"trials", double(trials)},
                       {"identity_failures", double(identity_failures)}};
  return report;
}

namespace {

Vector random_sparse(std::size_t n, std::size_t k, Rng& rng) {
  Vector x = Vector::Zero(static_cast<Index>(n));
  std::uniform_real_distribution<double> magnitude(0.05, 1.0);
  std::bernoulli_distribution sign(0.5);
  for (auto i : sample_without_replacement(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(k), rng))
    x(i) = (sign(rng) ? 1.0 : -1.0) * magnitude(rng);
  return x;
}

}  // namespace

CheckReport check_rip_p(const BipartiteGraph& g, std::size_t k, double p, double epsilon_hat,
                        std::size_t trials, std::uint64_t seed, double c) {
  require(p >= 1.0, "p must be at least 1");
  require(k >= 1 && k <= g.n_left(), "sparsity out of range");
  CheckReport report;
  report.name = "rip_p";
  report.hard = p == 1.0 && c == 2.0;
  report.parameters = {{"n", double(g.n_left())}, {"m", double(g.m_right())}, {"d", double(g.degree())},
                       {"k", double(k)},          {"p", p},                   {"epsilon_hat", epsilon_hat},
                       {"c", c},                  {"trials", double(trials)}};
  const auto phi = from_graph(g);
  const double scale = std::pow(static_cast<double>(g.degree()), -1.0 / p);
  const double factor = 1.0 - c * epsilon_hat;
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> size(1, k);
  for (std::size_t t = 0; t < trials; ++t) {
    const Vector x = random_sparse(g.n_left(), size(rng), rng);
    const double image = scale * lp_norm(multiply_binary(phi, x), p);
    report.record(factor * lp_norm(x, p), image, 1e-12 * lp_norm(x, p));
  }
  if (!report.hard) report.note = "margin report: the constant c is not explicit for p > 1";
  return report;
}

CheckReport check_nullspace_spread(const SparseBinaryMatrix& phi, std::size_t k, double epsilon,
                                   std::size_t trials, std::uint64_t seed) {
  CheckReport report;
  report.name = "nullspace_spread";
  report.parameters = {{"n", double(phi.cols())}, {"m", double(phi.rows())}, {"k", double(k)},
                       {"epsilon", epsilon},      {"trials", double(trials)}};
  if (!(epsilon >= 0.0 && epsilon < 0.5)) {
    report.inconclusive = true;
    report.note = "alpha(epsilon) undefined for epsilon >= 1/2";
    return report;
  }
  const double alpha = spread_constant(epsilon);
  report.parameters["alpha"] = alpha;
  const Matrix dense = to_dense(phi);
  const Matrix basis = null_space_basis(dense);
  if (basis.cols() == 0) {
    report.inconclusive = true;
    report.note = "trivial kernel";
    return report;
  }
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::size_t filtered = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Vector coeffs(basis.cols());
    for (Index c = 0; c < coeffs.size(); ++c) coeffs(c) = normal(rng);
    Vector y = basis * coeffs;
    const double norm = y.norm();
    if (norm == 0.0) continue;
    y /= norm;
    if ((dense * y).cwiseAbs().maxCoeff() > 1e-10) {
      ++filtered;
      continue;
    }
    report.record(head(y, k).lpNorm<1>(), alpha * y.lpNorm<1>(), 1e-9);
  }
  report.parameters["filtered"] = double(filtered);
  report.parameters["kernel_dimension"] = double(basis.cols());
  if (report.instances == 0) {
    report.inconclusive = true;
    report.note = "no kernel sample passed the residual filter";
  }
  return report;
}

CheckReport check_rip2_not_rip1_demo(std::size_t n, std::size_t k, std::uint64_t seed) {
  require(k >= 1 && k <= n, "demo needs 1 <= k <= n");
  CheckReport report;
  report.name = "rip2_not_rip1";
  const std::size_t rows = k * std::max<std::size_t>(ceil_log2(n), 1);
  Rng rng(seed);
  std::normal_distribution<double> normal;
  Matrix G(static_cast<Index>(rows), static_cast<Index>(n));
  for (Index c = 0; c < G.cols(); ++c)
    for (Index r = 0; r < G.rows(); ++r) G(r, c) = normal(rng);
  Vector x = Vector::Zero(static_cast<Index>(n));
  x(0) = 1.0;
  Vector y = Vector::Zero(static_cast<Index>(n));
  y.head(static_cast<Index>(k)).setConstant(1.0 / static_cast<double>(k));
  const double ratio = (G * x).lpNorm<1>() / (G * y).lpNorm<1>();
  const double root = std::sqrt(static_cast<double>(k));
  report.record_margin(std::max(root / 2.0 - ratio, ratio - 2.0 * root));
  report.parameters = {{"n", double(n)},     {"k", double(k)},   {"rows", double(rows)},
                       {"ratio", ratio},     {"sqrt_k", root},   {"x_l1", x.lpNorm<1>()},
                       {"y_l1", y.lpNorm<1>()}};
  return report;
}

CheckReport check_head_bounds(std::size_t n, double p, std::size_t trials, std::uint64_t seed) {
  require(n >= 2, "head bound sweep needs n >= 2");
  CheckReport report;
  report.name = "head_bound";
  report.parameters = {{"n", double(n)}, {"p", p}, {"trials", double(trials)}};
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> exponent(0.3, 2.5);
  std::uniform_int_distribution<std::size_t> support(1, n);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Vector g = Vector::Zero(static_cast<Index>(n));
    switch (trial % 3) {
      case 0:
        for (Index i = 0; i < g.size(); ++i) g(i) = normal(rng);
        break;
      case 1:
        g = compressible_signal(n, exponent(rng), rng());
        break;
      default:
        for (auto i : sample_without_replacement(static_cast<std::uint32_t>(n),
                                                 static_cast<std::uint32_t>(support(rng)), rng))
          g(i) = normal(rng);
        break;
    }
    for (std::size_t t = 1; t < n; t *= 2) {
      const auto bound = check_head_bound(g, t, p);
      report.record(bound.lhs, bound.rhs, 1e-12 * std::max(1.0, g.lpNorm<1>()));
    }
  }
  return report;
}

Vector compressible_signal(std::size_t n, double exponent, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution sign(0.5);
  Vector x(static_cast<Index>(n));
  for (std::size_t r = 0; r < n; ++r)
    x(static_cast<Index>(order[r])) =
        (sign(rng) ? 1.0 : -1.0) * std::pow(static_cast<double>(r + 1), -exponent);
  return x;
}

CheckReport check_lp_guarantee(const SparseBinaryMatrix& phi, std::size_t k, double epsilon,
                               std::size_t trials, std::uint64_t seed, double exponent) {
  CheckReport report;
  report.name = "lp_guarantee";
  report.parameters = {{"n", double(phi.cols())}, {"m", double(phi.rows())}, {"k", double(k)},
                       {"epsilon", epsilon},      {"exponent", exponent},   {"trials", double(trials)}};
  if (!(epsilon >= 0.0 && epsilon < 0.25)) {
    report.inconclusive = true;
    report.note = "bound undefined: epsilon >= 1/4";
    return report;
  }
  std::size_t solver_failures = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Vector x = compressible_signal(phi.cols(), exponent, derive_seed(seed, {t}));
    const auto solution = decode(phi, apply(phi, x));
    if (solution.status != LpStatus::optimal) {
      ++solver_failures;
      report.record_margin(std::numeric_limits<double>::infinity());
      continue;
    }
    const auto ev = evaluate_bound(x, solution.x_star, k, epsilon);
    report.record(ev.lhs, ev.rhs, 1e-9);
  }
  report.parameters["solver_failures"] = double(solver_failures);
  return report;
}

IsolationAccount isolation_accounting(const SparseBinaryMatrix& sifting, const Vector& g,
                                      std::size_t ell, double rho_prime) {
  require(static_cast<std::size_t>(g.size()) == sifting.cols(), "signal length does not match");
  const auto band = top_indices(g, ell);
  const Vector magnitude = g.cwiseAbs();
  const Vector row_mass = multiply_binary(sifting, magnitude);
  Vector indicator = Vector::Zero(g.size());
  for (Index i : band) indicator(i) = 1.0;
  const Vector band_hits = multiply_binary(sifting, indicator);
  const double allowed = 2.0 / static_cast<double>(std::max<std::size_t>(ell, 1)) * magnitude.sum();

  IsolationAccount out{band.size(), 0, rho_prime};
  for (Index i : band) {
    for (RowIndex row : sifting.column(static_cast<std::size_t>(i))) {
      if (band_hits(row) == 1.0 && row_mass(row) - magnitude(i) <= allowed * (1 + 1e-12)) {
        ++out.isolated;
        break;
      }
    }
  }
  return out;
}

NoiseReductionAccount noise_reduction_accounting(const NWMatrix& R, std::size_t i, const Vector& nu,
                                                 std::size_t r, double c) {
  require(i < R.n && static_cast<std::size_t>(nu.size()) == R.n, "index or noise length out of range");
  require(r >= 1, "r must be positive");
  Vector others = nu.cwiseAbs();
  others(static_cast<Index>(i)) = 0.0;
  const Vector row_noise = multiply_binary(R.matrix, others);
  NoiseReductionAccount out;
  std::vector<double> noise;
  for (RowIndex row : R.matrix.column(i)) {
    noise.push_back(row_noise(row));
    if (row_noise(row) <= c / static_cast<double>(r)) ++out.good;
  }
  out.rows = noise.size();
  if (!noise.empty()) {
    const auto mid = noise.begin() + static_cast<std::ptrdiff_t>((noise.size() - 1) / 2);
    std::nth_element(noise.begin(), mid, noise.end());
    out.calibrated_c = static_cast<double>(r) * *mid;
  }
  return out;
}

ProgressAccount progress_accounting(const Vector& x, const HhsResult& traced, std::size_t k, double p) {
  ProgressAccount out;
  const double floor_value = std::pow(static_cast<double>(std::max<std::size_t>(k, 1)), 1.0 / p - 1.0) *
                             tail(x, k).lpNorm<1>();
  Vector previous = Vector::Zero(x.size());
  for (const auto& iteration : traced.iterations) {
    if (iteration.approximation.size() != x.size()) break;  // untraced run
    const double before = lp_norm(Vector(x - previous), p);
    const double after = lp_norm(Vector(x - iteration.approximation), p);
    if (before > floor_value) {
      ++out.eligible;
      if (after <= 0.5 * before) ++out.halved;
      out.ratios.push_back(before > 0.0 ? after / before : 0.0);
    }
    previous = iteration.approximation;
  }
  return out;
}

}  // namespace expsketch
