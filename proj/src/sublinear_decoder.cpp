#include "expsketch/sublinear_decoder.hpp"

#include <algorithm>
#include <cmath>

namespace expsketch {

BitTestMatrix make_bit_tests(std::size_t n) {
  require(n >= 1, "bit tests need at least one column");
  const std::size_t bits = ceil_log2(n);
  const std::size_t tests = bits + 1;
  std::vector<std::vector<RowIndex>> columns(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < bits; ++t)
      if ((i >> t) & 1u) columns[i].push_back(static_cast<RowIndex>(t));
    columns[i].push_back(static_cast<RowIndex>(bits));
  }
  return BitTestMatrix{n, tests, SparseBinaryMatrix(tests, n, std::move(columns))};
}

AugmentedMeasurement build_augmented(const SparseBinaryMatrix& psi) {
  require(psi.scale() == 1.0, "augmented measurement needs an unscaled expander matrix");
  auto bits = make_bit_tests(psi.cols());
  auto phi = row_tensor_product(psi, bits.matrix);
  return AugmentedMeasurement{psi, std::move(bits), std::move(phi)};
}

std::optional<Spike> decode_block(std::span<const double> block, std::size_t n,
                                  const BlockDecodeOptions& options) {
  require(!block.empty(), "empty bit-test group");
  const std::size_t bits = block.size() - 1;
  const double value = block[bits];
  if (std::abs(value) <= options.tol) return std::nullopt;
  const double slack = options.tol + options.rel_tol * std::abs(value);

  std::size_t index = 0;
  for (std::size_t t = 0; t < bits; ++t) {
    const double reading = block[t];
    const bool set = std::abs(reading) > std::abs(value - reading);
    const double mismatch = set ? std::abs(reading - value) : std::abs(reading);
    if (mismatch > slack) return std::nullopt;
    if (set) index |= std::size_t{1} << t;
  }
  if (index >= n) return std::nullopt;
  return Spike{index, value};
}

namespace {

/// Groups near-equal votes and picks the winner at one index.
struct VoteResult {
  std::optional<double> value;
  bool conflict = false;
};

VoteResult tally(std::vector<double>& votes, std::size_t threshold, double tol) {
  std::sort(votes.begin(), votes.end());
  VoteResult result;
  std::size_t best_count = 0;
  std::size_t qualifying = 0;
  for (std::size_t begin = 0; begin < votes.size();) {
    std::size_t end = begin + 1;
    while (end < votes.size() && std::abs(votes[end] - votes[begin]) <= tol) ++end;
    const std::size_t count = end - begin;
    const double value = votes[begin];
    if (count >= threshold) {
      ++qualifying;
      const bool better = count > best_count ||
                          (count == best_count && std::abs(value) < std::abs(*result.value));
      if (better) {
        best_count = count;
        result.value = value;
      }
    }
    begin = end;
  }
  result.conflict = qualifying > 1;
  return result;
}

}  // namespace

ReduceOutcome reduce(const AugmentedMeasurement& am, const Vector& sketch, double tol) {
  const std::size_t L = am.group_length();
  const std::size_t n = am.psi.cols();
  require(static_cast<std::size_t>(sketch.size()) == am.groups() * L,
          "sketch length does not match the augmented measurement");
  const auto degree = am.psi.column_degree();
  require(degree.has_value(), "reduce needs a column-regular expander matrix");
  const std::size_t threshold = (*degree + 1) / 2;

  std::vector<std::vector<double>> votes(n);
  const BlockDecodeOptions options{tol, 0.0};
  for (std::size_t j = 0; j < am.groups(); ++j) {
    const std::span<const double> block(sketch.data() + j * L, L);
    if (auto spike = decode_block(block, n, options)) votes[spike->index].push_back(spike->value);
  }

  ReduceOutcome out;
  out.y = Vector::Zero(static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (votes[i].empty()) continue;
    const auto result = tally(votes[i], threshold, tol);
    if (result.value) out.y(static_cast<Index>(i)) = *result.value;
    if (result.conflict) out.conflicts.push_back(i);
  }
  return out;
}

std::size_t recover_iteration_cap(std::size_t k) { return ceil_log2(std::max<std::size_t>(k, 1)) + 1; }

RecoverOutcome recover(const AugmentedMeasurement& am, const Vector& sketch, std::size_t k, double tol) {
  require(static_cast<std::size_t>(sketch.size()) == am.phi.rows(),
          "sketch length does not match the augmented measurement");
  RecoverOutcome out;
  out.x = Vector::Zero(static_cast<Index>(am.psi.cols()));
  Vector residual = sketch;
  const std::size_t cap = recover_iteration_cap(k);
  while (true) {
    out.residual_norm = residual.size() == 0 ? 0.0 : residual.cwiseAbs().maxCoeff();
    if (out.residual_norm <= tol) {
      out.success = true;
      return out;
    }
    if (out.iterations == cap) return out;
    auto round = reduce(am, residual, tol);
    ++out.iterations;
    out.conflicts.insert(out.conflicts.end(), round.conflicts.begin(), round.conflicts.end());
    if (round.y.isZero(0.0)) {
      return out;  // no progress possible
    }
    out.x += round.y;
    residual -= multiply_binary(am.phi, round.y);
  }
}

}  // namespace expsketch
