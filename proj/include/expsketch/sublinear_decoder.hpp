#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "expsketch/sparse_binary_matrix.hpp"

namespace expsketch {

/// Bit tests over n columns: for t < L-1, row t has a one at column i iff bit t of i is
/// set; row L-1 is all ones. L = ceil(log2 n) + 1.
///
/// The ones-row reads the spike value directly, which is what lets index 0 (all bits
/// clear) be told apart from an empty measurement.
struct BitTestMatrix {
  std::size_t n = 0;
  std::size_t num_tests = 0;
  SparseBinaryMatrix matrix;
};

BitTestMatrix make_bit_tests(std::size_t n);

/// Expander adjacency psi (m rows) augmented with bit tests: phi = psi (*) B, so the
/// L-row group of psi-row j occupies rows [j L, (j+1) L).
struct AugmentedMeasurement {
  SparseBinaryMatrix psi;
  BitTestMatrix bit_tests;
  SparseBinaryMatrix phi;

  std::size_t groups() const { return psi.rows(); }
  std::size_t group_length() const { return bit_tests.num_tests; }
};

AugmentedMeasurement build_augmented(const SparseBinaryMatrix& psi);

struct Spike {
  std::size_t index = 0;
  double value = 0.0;
  friend bool operator==(const Spike&, const Spike&) = default;
};

struct BlockDecodeOptions {
  /// Absolute zero test.
  double tol = 1e-9;
  /// Additional tolerance relative to |value|; 0 demands an exactly consistent block.
  double rel_tol = 0.0;
};

/// Reads (index, value) off one bit-test group, or nothing when the ones-row is zero or the
/// group is inconsistent with a lone spike (a detected collision). A returned pair always
/// re-encodes to the input group within the tolerances.
std::optional<Spike> decode_block(std::span<const double> block, std::size_t n,
                                  const BlockDecodeOptions& options = {});

struct ReduceOutcome {
  Vector y;
  /// Indices where two distinct values both reached the vote threshold.
  std::vector<std::size_t> conflicts;
};

/// One voting round: every group proposes a spike; index i takes value v when v received at
/// least ceil(d/2) votes. Ties between qualifying values go to more votes, then smaller |v|.
ReduceOutcome reduce(const AugmentedMeasurement& am, const Vector& sketch, double tol = 1e-9);

struct RecoverOutcome {
  Vector x;
  bool success = false;
  std::size_t iterations = 0;
  double residual_norm = 0.0;  // l_inf of the final residual sketch
  std::vector<std::size_t> conflicts;
};

/// Iterates reduce and residual subtraction until the residual sketch vanishes or
/// ceil(log2 k) + 1 rounds have run.
RecoverOutcome recover(const AugmentedMeasurement& am, const Vector& sketch, std::size_t k,
                       double tol = 1e-9);

std::size_t recover_iteration_cap(std::size_t k);

}  // namespace expsketch
