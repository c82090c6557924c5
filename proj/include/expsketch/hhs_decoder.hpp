#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "expsketch/nw_matrix.hpp"
#include "expsketch/sparse_binary_matrix.hpp"
#include "expsketch/sublinear_decoder.hpp"

namespace expsketch {

/// Concrete constants for the pursuit. Each asymptotic quantity gets one named knob.
struct HhsParams {
  /// Left degree d of every sifting and estimation expander.
  std::size_t degree = 8;
  /// Output quality parameter; the output holds at most floor(2k / epsilon) spikes.
  double epsilon = 1.0;
  /// Sifting expansion defect eps'; must satisfy 4 eps' + 1 / (2 d^{1/p}) < 1/2.
  double sifting_defect = 0.1;
  /// Sifting rows m_s = max(d, ceil(factor * s * d / eps')).
  double sifting_row_factor = 0.25;
  /// Estimation rows = max(d, ceil(factor * K * d)) with K = k ceil(log2 n). At 2 the
  /// normalized Gram matrix of any K columns stays well inside the step-1 stability region.
  double estimation_row_factor = 2.0;
  /// A location survives scale j when it is read at least ceil(fraction * d * j) times.
  double retain_fraction = 0.25;
  /// Relative tolerance for bit-test readings under noise.
  double decode_rel_tol = 0.25;
  /// Blocks R (*) S with more rows than this are dropped (and logged).
  std::size_t max_block_rows = std::size_t{1} << 17;
  std::size_t estimation_max_iterations = 50;
  double estimation_tol = 1e-8;
  /// Consecutive residual increases that count as divergence.
  std::size_t divergence_window = 5;
};

/// One isolation block A^{(j)}_{r,s} = R_r (*) S^{(j)}_s, placed in the identification
/// matrix as (R (*) S) (*) B at rows [row_offset, row_offset + rows).
struct HhsBlock {
  std::size_t j = 0;
  std::size_t r = 0;
  std::size_t s = 0;
  std::size_t beta = 0;
  SparseBinaryMatrix sifting;
  std::size_t row_offset = 0;
  std::size_t rows = 0;  // identification rows including bit tests
};

struct HhsMeasurement {
  std::size_t n = 0;
  std::size_t k = 0;
  double p = 1.0;
  std::size_t K = 0;
  std::uint64_t seed = 0;
  HhsParams params;
  BitTestMatrix bit_tests;
  std::vector<HhsBlock> blocks;
  SparseBinaryMatrix identification;
  SparseBinaryMatrix estimation;  // l_p-normalized columns
  std::vector<std::string> truncated;

  std::size_t sketch_length() const { return identification.rows() + estimation.rows(); }
};

/// p = 1 + 1 / log2 n.
double hhs_norm_exponent(std::size_t n);

HhsMeasurement build_measurement(std::size_t n, std::size_t k, std::uint64_t seed,
                                 const HhsParams& params = {});

/// Rebuilds the identification matrix from sifting factors (used after deserialization).
HhsMeasurement assemble_measurement(std::size_t n, std::size_t k, std::uint64_t seed,
                                    const HhsParams& params, std::vector<HhsBlock> blocks,
                                    SparseBinaryMatrix estimation, std::vector<std::string> truncated);

/// v = [Omega x; Phi_est x].
Vector encode(const HhsMeasurement& hm, const Vector& x);

using SpikeList = std::vector<Spike>;

/// Sorted by index, one entry per index, zero values dropped.
SpikeList normalize_spikes(SpikeList spikes);
Vector to_dense(const SpikeList& spikes, std::size_t n);

enum class HhsStatus { converged, completed, stalled, estimation_diverged };
const char* to_string(HhsStatus status);

struct HhsIteration {
  std::size_t identified = 0;  // |L'|, capped at K by vote strength
  std::size_t estimation_steps = 0;
  double residual_norm = 0.0;  // l2 of the residual sketch after the update
  Vector approximation;        // filled when tracing is requested
};

struct HhsResult {
  SpikeList spikes;
  HhsStatus status = HhsStatus::completed;
  std::vector<HhsIteration> iterations;
};

struct HhsPursuitOptions {
  bool trace_approximations = false;
};

/// Identify / estimate / prune / subtract, for ceil(log2 delta_range) + 1 outer iterations.
HhsResult hhs_pursuit(const HhsMeasurement& hm, const Vector& v, std::size_t k, double delta_range,
                      const HhsPursuitOptions& options = {});

/// Dynamic range ||x||_inf / min nonzero |x_i| (1 for the zero vector).
double dynamic_range(const Vector& x);

/// Single inequality evaluation: lhs <= rhs.
struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = true;
  double margin() const { return lhs - rhs; }
};

struct TruncationReport {
  BoundReport lp;  // ||x - xhat_k||_p <= ||x - x_k||_p + 2 eps k^{1/p-1} ||x - x_k||_1
  BoundReport l1;  // ||x - xhat_k||_1 <= (1 + 3 eps) ||x - x_k||_1
};

/// Keeps the k largest-magnitude spikes and evaluates both truncation inequalities.
std::pair<SpikeList, TruncationReport> truncate_to_k(const SpikeList& xhat, std::size_t k,
                                                     const Vector& x, double epsilon, double p);

/// ||x - xhat||_p / (k^{1/p-1} ||x - x_k||_1): the constant the error bound needs at this instance.
double error_bound_constant(const Vector& x, const Vector& xhat, std::size_t k, double p);

/// ||g - g_t||_p <= (1/(p-1))^{1/p} t^{1/p-1} ||g||_1. Requires 1 < p <= 2.
BoundReport check_head_bound(const Vector& g, std::size_t t, double p);

/// ||phi x||_p <= (1 + delta)(||x||_p + K^{1/p-1} ||x||_1) with delta = 2 eps / (1 - 2 eps)
/// from the measured expansion defect.
BoundReport check_rip_p_operator_bound(const SparseBinaryMatrix& phi, std::size_t K, const Vector& x,
                                       double p, double epsilon_hat);

}  // namespace expsketch
