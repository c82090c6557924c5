#include "expsketch/hhs_decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "expsketch/random.hpp"

namespace expsketch {

namespace {

std::vector<std::size_t> powers_of_two_up_to(std::size_t limit) {
  std::vector<std::size_t> out;
  for (std::size_t v = 1; v <= limit; v *= 2) out.push_back(v);
  return out;
}

std::size_t sifting_rows(std::size_t s, const HhsParams& params) {
  const double raw = std::ceil(params.sifting_row_factor * static_cast<double>(s) *
                               static_cast<double>(params.degree) / params.sifting_defect);
  return std::max(params.degree, static_cast<std::size_t>(raw));
}

std::size_t estimation_rows(std::size_t K, const HhsParams& params) {
  const double raw = std::ceil(params.estimation_row_factor * static_cast<double>(K) *
                               static_cast<double>(params.degree));
  return std::max(params.degree, static_cast<std::size_t>(raw));
}

void validate(std::size_t n, std::size_t k, const HhsParams& params, double p) {
  require(n >= 2, "HHS measurement needs n >= 2");
  require(k >= 1 && 2 * k <= n, "HHS measurement needs 1 <= k <= n/2");
  require(params.degree >= 1, "degree must be positive");
  require(params.epsilon > 0.0, "epsilon must be positive");
  require(params.sifting_defect > 0.0, "sifting defect must be positive");
  require(params.sifting_row_factor > 0.0 && params.estimation_row_factor > 0.0,
          "row factors must be positive");
  require(params.retain_fraction > 0.0, "retain fraction must be positive");
  require(params.decode_rel_tol >= 0.0 && params.decode_rel_tol < 0.5,
          "decode relative tolerance must lie in [0, 1/2)");
  require(params.divergence_window >= 1, "divergence window must be positive");
  const double rho = 4.0 * params.sifting_defect +
                     1.0 / (2.0 * std::pow(static_cast<double>(params.degree), 1.0 / p));
  require(rho < 0.5, "sifting defect violates 4 eps' + 1/(2 d^{1/p}) < 1/2 (got " +
                         std::to_string(rho) + ")");
}

double sketch_scale(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

/// Residual-correction estimate of the coefficients on `support` from the estimation sketch.
struct Estimate {
  std::vector<double> z;
  std::size_t steps = 0;
  bool diverged = false;
};

Estimate estimate_coefficients(const SparseBinaryMatrix& est, std::span<const std::size_t> support,
                               const Vector& s_est, const HhsParams& params) {
  Estimate out;
  out.z.assign(support.size(), 0.0);
  const double c = est.scale();
  const double column_sq = c * c * static_cast<double>(params.degree);
  const double target = s_est.norm();
  if (support.empty() || target == 0.0) return out;

  Vector residual = s_est;
  double previous = target;
  std::size_t increases = 0;
  std::vector<double> step(support.size());
  for (std::size_t it = 0; it < params.estimation_max_iterations; ++it) {
    for (std::size_t a = 0; a < support.size(); ++a) {
      double g = 0.0;
      for (RowIndex r : est.column(support[a])) g += residual(r);
      step[a] = c * g / column_sq;
    }
    for (std::size_t a = 0; a < support.size(); ++a) {
      out.z[a] += step[a];
      for (RowIndex r : est.column(support[a])) residual(r) -= c * step[a];
    }
    out.steps = it + 1;
    const double norm = residual.norm();
    if (norm / target < params.estimation_tol) break;
    increases = norm > previous ? increases + 1 : 0;
    if (increases >= params.divergence_window) {
      out.diverged = true;
      break;
    }
    previous = norm;
  }
  return out;
}

/// L' = union over scales j of the locations read at least ceil(fraction * d * j) times.
/// When more than K qualify, the strongest (count / threshold) are kept.
std::vector<std::size_t> identify(const HhsMeasurement& hm, const Vector& residual, double tol) {
  const std::size_t L = hm.bit_tests.num_tests;
  const BlockDecodeOptions options{tol, hm.params.decode_rel_tol};
  std::map<std::size_t, std::vector<std::uint32_t>> counts;  // scale j -> per-index reads
  for (const auto& block : hm.blocks) {
    auto& tally = counts[block.j];
    if (tally.empty()) tally.assign(hm.n, 0);
    for (std::size_t row = block.row_offset; row < block.row_offset + block.rows; row += L) {
      const std::span<const double> group(residual.data() + row, L);
      if (auto spike = decode_block(group, hm.n, options)) ++tally[spike->index];
    }
  }

  std::vector<double> strength(hm.n, 0.0);
  for (const auto& [j, tally] : counts) {
    const double threshold = std::ceil(hm.params.retain_fraction *
                                       static_cast<double>(hm.params.degree * j));
    for (std::size_t i = 0; i < hm.n; ++i)
      if (tally[i] > 0 && tally[i] >= threshold)
        strength[i] = std::max(strength[i], tally[i] / std::max(threshold, 1.0));
  }
  std::vector<std::size_t> found;
  for (std::size_t i = 0; i < hm.n; ++i)
    if (strength[i] > 0.0) found.push_back(i);
  if (found.size() > hm.K) {
    std::stable_sort(found.begin(), found.end(),
                     [&](std::size_t a, std::size_t b) { return strength[a] > strength[b]; });
    found.resize(hm.K);
    std::sort(found.begin(), found.end());
  }
  return found;
}

}  // namespace

double hhs_norm_exponent(std::size_t n) {
  require(n >= 2, "p = 1 + 1/log2 n needs n >= 2");
  return 1.0 + 1.0 / std::log2(static_cast<double>(n));
}

HhsMeasurement assemble_measurement(std::size_t n, std::size_t k, std::uint64_t seed,
                                    const HhsParams& params, std::vector<HhsBlock> blocks,
                                    SparseBinaryMatrix estimation, std::vector<std::string> truncated) {
  const double p = hhs_norm_exponent(n);
  validate(n, k, params, p);
  require(!blocks.empty(), "HHS measurement needs at least one isolation block");
  require(estimation.cols() == n, "estimation matrix has the wrong column count");

  auto bits = make_bit_tests(n);
  std::map<std::size_t, NWMatrix> fields;
  std::vector<SparseBinaryMatrix> parts;
  parts.reserve(blocks.size());
  std::size_t offset = 0;
  for (auto& block : blocks) {
    require(block.sifting.cols() == n && block.sifting.scale() == 1.0,
            "sifting factors must be unscaled with n columns");
    require(block.sifting.column_degree() == params.degree,
            "sifting factor is not column-regular with the configured degree");
    require(block.r >= 2 * block.s && block.s >= 1, "block scales need r >= 2s >= 2");
    auto it = fields.find(block.beta);
    if (it == fields.end()) it = fields.emplace(block.beta, nw_matrix_for_field(n, block.beta)).first;
    auto isolation = row_tensor_product(it->second.matrix, block.sifting);
    parts.push_back(row_tensor_product(isolation, bits.matrix));
    block.row_offset = offset;
    block.rows = parts.back().rows();
    offset += block.rows;
  }

  HhsMeasurement hm{n,
                    k,
                    p,
                    k * std::max<std::size_t>(ceil_log2(n), 1),
                    seed,
                    params,
                    std::move(bits),
                    std::move(blocks),
                    vstack(parts),
                    std::move(estimation),
                    std::move(truncated)};
  require(hm.estimation.column_degree() == params.degree,
          "estimation matrix is not column-regular with the configured degree");
  return hm;
}

HhsMeasurement build_measurement(std::size_t n, std::size_t k, std::uint64_t seed,
                                 const HhsParams& params) {
  const double p = hhs_norm_exponent(n);
  validate(n, k, params, p);
  const std::size_t log_n = std::max<std::size_t>(ceil_log2(n), 1);
  const std::size_t K = k * log_n;

  std::vector<HhsBlock> blocks;
  std::vector<std::string> truncated;
  const auto scales = powers_of_two_up_to(k);
  for (std::size_t j : scales) {
    for (std::size_t s : scales) {
      const std::size_t m_s = sifting_rows(s, params);
      require(params.degree <= m_s, "sifting matrix has fewer rows than the degree");
      auto sifting = from_graph(sample_expander(n, m_s, params.degree, derive_seed(seed, {1, j, s})));
      for (std::size_t r = 2 * s; r <= n; r *= 2) {
        const std::size_t beta = nw_field_size(n, r, s);
        const std::size_t rows = beta * beta * m_s;
        const bool band_ok = r == 2 * s || r * r <= k * s;
        const std::string tag = "(j=" + std::to_string(j) + ", r=" + std::to_string(r) +
                                ", s=" + std::to_string(s) + ")";
        if (!band_ok) {
          truncated.push_back(tag + " dropped: r^2/s > k");
          continue;
        }
        if (rows > params.max_block_rows) {
          truncated.push_back(tag + " dropped: " + std::to_string(rows) + " rows exceeds budget");
          continue;
        }
        blocks.push_back(HhsBlock{j, r, s, beta, sifting, 0, 0});
      }
    }
  }
  if (blocks.empty()) throw BudgetError("every HHS isolation block exceeds the row budget");

  const std::size_t m_est = estimation_rows(K, params);
  auto estimation = set_rip_p_scale(
      from_graph(sample_expander(n, m_est, params.degree, derive_seed(seed, {2}))), p);
  return assemble_measurement(n, k, seed, params, std::move(blocks), std::move(estimation),
                              std::move(truncated));
}

Vector encode(const HhsMeasurement& hm, const Vector& x) {
  require(static_cast<std::size_t>(x.size()) == hm.n, "signal length does not match the measurement");
  Vector v(static_cast<Index>(hm.sketch_length()));
  v.head(static_cast<Index>(hm.identification.rows())) = multiply_binary(hm.identification, x);
  v.tail(static_cast<Index>(hm.estimation.rows())) = apply(hm.estimation, x).values;
  return v;
}

SpikeList normalize_spikes(SpikeList spikes) {
  std::sort(spikes.begin(), spikes.end(),
            [](const Spike& a, const Spike& b) { return a.index < b.index; });
  SpikeList out;
  for (const auto& spike : spikes) {
    if (!out.empty() && out.back().index == spike.index)
      out.back().value += spike.value;
    else
      out.push_back(spike);
  }
  std::erase_if(out, [](const Spike& s) { return s.value == 0.0; });
  return out;
}

Vector to_dense(const SpikeList& spikes, std::size_t n) {
  Vector x = Vector::Zero(static_cast<Index>(n));
  for (const auto& spike : spikes) {
    require(spike.index < n, "spike index out of range");
    x(static_cast<Index>(spike.index)) += spike.value;
  }
  return x;
}

const char* to_string(HhsStatus status) {
  switch (status) {
    case HhsStatus::converged: return "converged";
    case HhsStatus::completed: return "completed";
    case HhsStatus::stalled: return "stalled";
    case HhsStatus::estimation_diverged: return "estimation-diverged";
  }
  return "unknown";
}

HhsResult hhs_pursuit(const HhsMeasurement& hm, const Vector& v, std::size_t k, double delta_range,
                      const HhsPursuitOptions& options) {
  require(static_cast<std::size_t>(v.size()) == hm.sketch_length(),
          "sketch length does not match the HHS measurement");
  require(delta_range >= 1.0 && std::isfinite(delta_range), "dynamic range must be finite and >= 1");
  require(k >= 1, "k must be positive");

  const std::size_t outer = ceil_log2(static_cast<std::size_t>(std::ceil(delta_range))) + 1;
  const std::size_t cap = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(2.0 * static_cast<double>(k) / hm.params.epsilon)));
  // Estimation is only accurate to estimation_tol, so that is the floor for a vanished residual.
  const double zero_tol = hm.params.estimation_tol * std::max(1.0, sketch_scale(v));
  const double decode_tol = 1e-9 * std::max(1.0, sketch_scale(v));
  const Index id_rows = static_cast<Index>(hm.identification.rows());
  const Index est_rows = static_cast<Index>(hm.estimation.rows());

  HhsResult result;
  Vector approximation = Vector::Zero(static_cast<Index>(hm.n));
  Vector residual = v;
  for (std::size_t it = 0; it < outer; ++it) {
    if (sketch_scale(residual) <= zero_tol) {
      result.status = HhsStatus::converged;
      break;
    }
    const auto found = identify(hm, residual, decode_tol);
    if (found.empty()) {
      result.status = HhsStatus::stalled;
      break;
    }
    const Vector s_est = residual.tail(est_rows);
    const auto estimate = estimate_coefficients(hm.estimation, found, s_est, hm.params);

    HhsIteration record;
    record.identified = found.size();
    record.estimation_steps = estimate.steps;
    if (estimate.diverged) {
      record.residual_norm = residual.norm();
      result.iterations.push_back(std::move(record));
      result.status = HhsStatus::estimation_diverged;
      break;
    }

    for (std::size_t a = 0; a < found.size(); ++a)
      approximation(static_cast<Index>(found[a])) += estimate.z[a];
    approximation = head(approximation, cap);

    residual.head(id_rows) = v.head(id_rows) - multiply_binary(hm.identification, approximation);
    residual.tail(est_rows) = v.tail(est_rows) - apply(hm.estimation, approximation).values;
    record.residual_norm = residual.norm();
    if (options.trace_approximations) record.approximation = approximation;
    result.iterations.push_back(std::move(record));
  }
  if (result.status == HhsStatus::completed && sketch_scale(residual) <= zero_tol)
    result.status = HhsStatus::converged;

  for (Index i = 0; i < approximation.size(); ++i)
    if (approximation(i) != 0.0) result.spikes.push_back(Spike{static_cast<std::size_t>(i), approximation(i)});
  return result;
}

double dynamic_range(const Vector& x) {
  double largest = 0.0;
  double smallest = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x(i));
    if (a == 0.0) continue;
    largest = std::max(largest, a);
    smallest = std::min(smallest, a);
  }
  return largest == 0.0 ? 1.0 : largest / smallest;
}

namespace {

BoundReport make_report(double lhs, double rhs, double scale) {
  return BoundReport{lhs, rhs, lhs <= rhs + 1e-9 * std::max(1.0, scale)};
}

}  // namespace

std::pair<SpikeList, TruncationReport> truncate_to_k(const SpikeList& xhat, std::size_t k,
                                                     const Vector& x, double epsilon, double p) {
  const std::size_t n = static_cast<std::size_t>(x.size());
  const Vector dense = to_dense(normalize_spikes(xhat), n);
  const Vector truncated = head(dense, k);
  SpikeList kept;
  for (Index i = 0; i < truncated.size(); ++i)
    if (truncated(i) != 0.0) kept.push_back(Spike{static_cast<std::size_t>(i), truncated(i)});

  const Vector tail_x = tail(x, k);
  const double tail_l1 = lp_norm(tail_x, 1.0);
  const double kp = std::pow(static_cast<double>(std::max<std::size_t>(k, 1)), 1.0 / p - 1.0);
  const Vector error = x - truncated;
  const double scale = lp_norm(x, 1.0);
  TruncationReport report{
      make_report(lp_norm(error, p), lp_norm(tail_x, p) + 2.0 * epsilon * kp * tail_l1, scale),
      make_report(lp_norm(error, 1.0), (1.0 + 3.0 * epsilon) * tail_l1, scale)};
  return {std::move(kept), report};
}

double error_bound_constant(const Vector& x, const Vector& xhat, std::size_t k, double p) {
  require(x.size() == xhat.size(), "signal and estimate lengths differ");
  const double error = lp_norm(Vector(x - xhat), p);
  const double tail_l1 = lp_norm(tail(x, k), 1.0);
  const double kp = std::pow(static_cast<double>(std::max<std::size_t>(k, 1)), 1.0 / p - 1.0);
  if (tail_l1 == 0.0)
    return error <= 1e-9 * std::max(1.0, lp_norm(x, 1.0)) ? 0.0
                                                          : std::numeric_limits<double>::infinity();
  return error / (kp * tail_l1);
}

BoundReport check_head_bound(const Vector& g, std::size_t t, double p) {
  require(p > 1.0 && p <= 2.0, "head bound needs 1 < p <= 2");
  require(t >= 1 && t < static_cast<std::size_t>(g.size()), "head bound needs 1 <= t < len(g)");
  const double lhs = lp_norm(tail(g, t), p);
  const double rhs = std::pow(1.0 / (p - 1.0), 1.0 / p) *
                     std::pow(static_cast<double>(t), 1.0 / p - 1.0) * lp_norm(g, 1.0);
  return make_report(lhs, rhs, lp_norm(g, 1.0));
}

BoundReport check_rip_p_operator_bound(const SparseBinaryMatrix& phi, std::size_t K, const Vector& x,
                                       double p, double epsilon_hat) {
  require(K >= 1, "K must be positive");
  require(p >= 1.0, "p must be at least 1");
  const double lhs = lp_norm(apply(phi, x).values, p);
  const double delta = epsilon_hat < 0.5 ? 2.0 * epsilon_hat / (1.0 - 2.0 * epsilon_hat)
                                         : std::numeric_limits<double>::infinity();
  const double rhs = (1.0 + delta) * (lp_norm(x, p) + std::pow(static_cast<double>(K), 1.0 / p - 1.0) *
                                                          lp_norm(x, 1.0));
  return make_report(lhs, rhs, lp_norm(x, 1.0));
}

}  // namespace expsketch
