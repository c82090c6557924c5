#pragma once

#include <cstddef>
#include <vector>

#include "expsketch/sparse_binary_matrix.hpp"

namespace expsketch {

/// Nisan-Wigderson style noise-reduction matrix over the prime field F_beta.
///
/// Rows are pairs (a, b) in F_beta^2 at index a * beta + b; column i is the polynomial whose
/// coefficients are the base-beta digits of i (degree <= degree_bound). Entry ((a, b), q) is 1
/// iff q(a) = b, so every column holds exactly beta ones and two distinct columns share at most
/// degree_bound rows.
struct NWMatrix {
  std::size_t beta = 0;
  std::size_t degree_bound = 0;
  std::size_t n = 0;
  SparseBinaryMatrix matrix;

  /// Coefficients (constant term first) of the polynomial assigned to column i.
  std::vector<std::size_t> polynomial(std::size_t i) const;
};

bool is_prime(std::size_t value);
std::size_t next_prime(std::size_t value);

/// Field size for the (r, s) noise-reduction block: smallest prime >= (r/s) ceil(log2 n).
std::size_t nw_field_size(std::size_t n, std::size_t r, std::size_t s);

/// NW matrix over F_beta for n columns; beta must be prime.
NWMatrix nw_matrix_for_field(std::size_t n, std::size_t beta);

/// Noise-reduction matrix for scales r >= 2s >= 2.
NWMatrix build_nw_matrix(std::size_t n, std::size_t r, std::size_t s);

}  // namespace expsketch
