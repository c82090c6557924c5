#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "expsketch/bipartite_graph.hpp"
#include "expsketch/hhs_decoder.hpp"
#include "expsketch/nw_matrix.hpp"
#include "expsketch/sparse_binary_matrix.hpp"

namespace expsketch {

/// Aggregate of one inequality checked over many instances.
///
/// margin = lhs - rhs - slack; an instance is a violation iff its margin is positive, so
/// worst_margin > 0 exactly when violations > 0.
struct CheckReport {
  std::string name;
  std::size_t instances = 0;
  std::size_t violations = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  /// False for margin-reporting checks whose constants are not explicit.
  bool hard = true;
  /// No instance could be evaluated (e.g. trivial kernel, undefined constant).
  bool inconclusive = false;
  std::string note;
  std::map<std::string, double> parameters;

  void record(double lhs, double rhs, double slack = 0.0);
  void record_margin(double margin);
  bool passed() const { return !inconclusive && violations == 0; }
};

/// Merge by summation; names and hardness must agree.
CheckReport merge(const CheckReport& a, const CheckReport& b);

/// Lexicographic edge scan over supp(x), coordinates ordered by decreasing magnitude
/// (ties to the lower index): an edge is a collision iff an earlier edge hit its right vertex.
struct CollisionDecomposition {
  std::vector<std::size_t> hits;  // u_j per right vertex
  std::vector<std::size_t> order;  // support in scan order
  double collision_mass = 0.0;     // sum of |x_i| over colliding edges
  double first_hit_mass = 0.0;     // sum of |x_i| over first-hit edges
};

CollisionDecomposition collision_mass(const BipartiteGraph& g, const Vector& x);

/// collision_mass <= eps_hat d ||x||_1 over random integer vectors of support <= k. The
/// decomposition identity collision + first-hit = d ||x||_1 is checked exactly and counted in
/// parameters["identity_failures"] (each failure is also a violation).
CheckReport check_collision_mass(const BipartiteGraph& g, std::size_t k, double epsilon_hat,
                                 std::size_t trials, std::uint64_t seed);

/// Random k-sparse x against the lower RIP-p bound d^{-1/p} ||phi x||_p >= (1 - c eps_hat) ||x||_p.
/// At p = 1 with c = 2 this is the proved bound and the report is hard; for p > 1 it only
/// reports margins.
CheckReport check_rip_p(const BipartiteGraph& g, std::size_t k, double p, double epsilon_hat,
                        std::size_t trials, std::uint64_t seed, double c = 2.0);

/// ||y_S||_1 <= alpha(eps) ||y||_1 for unit kernel vectors y and S = top-k of y.
CheckReport check_nullspace_spread(const SparseBinaryMatrix& phi, std::size_t k, double epsilon,
                                   std::size_t trials, std::uint64_t seed);

/// Dense Gaussian G with k ceil(log2 n) rows: ||G e_1||_1 / ||G y||_1 for y = (1/k) 1_{[0,k)}
/// must lie in [sqrt(k)/2, 2 sqrt(k)].
CheckReport check_rip2_not_rip1_demo(std::size_t n, std::size_t k, std::uint64_t seed);

/// Head bound over random vectors of length n (Gaussian, power-law and sparse draws in
/// rotation) at every t in {1, 2, 4, ...} below n.
CheckReport check_head_bounds(std::size_t n, double p, std::size_t trials, std::uint64_t seed);

/// Power-law vector: magnitudes (i + 1)^{-exponent} on a random permutation, random signs.
Vector compressible_signal(std::size_t n, double exponent, std::uint64_t seed);

/// LP decoding guarantee ||x - x_star||_1 <= 2/(1 - 2 alpha(eps)) ||x - x_k||_1 on compressible
/// signals. eps >= 1/4 leaves the bound undefined and the report inconclusive.
CheckReport check_lp_guarantee(const SparseBinaryMatrix& phi, std::size_t k, double epsilon,
                               std::size_t trials, std::uint64_t seed, double exponent = 1.5);

/// Spikes of the band I = top-ell of g isolated by a sifting matrix with small noise:
/// a row containing i and no other member of I, with noise l1 mass <= (2/ell) ||g||_1.
struct IsolationAccount {
  std::size_t band = 0;
  std::size_t isolated = 0;
  double rho_prime = 0.0;
  bool satisfied() const {
    return static_cast<double>(isolated) >= (1.0 - rho_prime) * static_cast<double>(band);
  }
};

IsolationAccount isolation_accounting(const SparseBinaryMatrix& sifting, const Vector& g,
                                      std::size_t ell, double rho_prime);

/// Rows of a noise-reduction matrix that contain column i, and how many carry noise l1 mass
/// <= c / r from the other columns of nu.
struct NoiseReductionAccount {
  std::size_t rows = 0;
  std::size_t good = 0;
  /// r times the median noise: the smallest c for which half the rows are good.
  double calibrated_c = 0.0;
  bool satisfied() const { return 2 * good >= rows; }
};

NoiseReductionAccount noise_reduction_accounting(const NWMatrix& R, std::size_t i, const Vector& nu,
                                                 std::size_t r, double c);

/// Geometric-progress bookkeeping over a traced pursuit: for each iteration whose starting
/// approximation a satisfies ||x - a||_p > k^{1/p-1} ||x - x_k||_1, checks the error halves.
struct ProgressAccount {
  std::size_t eligible = 0;
  std::size_t halved = 0;
  std::vector<double> ratios;  // ||x - a_new||_p / ||x - a||_p on eligible iterations
};

ProgressAccount progress_accounting(const Vector& x, const HhsResult& traced, std::size_t k, double p);

}  // namespace expsketch
