#include "expsketch/nw_matrix.hpp"

#include <algorithm>
#include <string>

namespace expsketch {

bool is_prime(std::size_t value) {
  if (value < 2) return false;
  for (std::size_t f = 2; f * f <= value; ++f)
    if (value % f == 0) return false;
  return true;
}

std::size_t next_prime(std::size_t value) {
  std::size_t candidate = std::max<std::size_t>(value, 2);
  while (!is_prime(candidate)) ++candidate;
  return candidate;
}

std::size_t nw_field_size(std::size_t n, std::size_t r, std::size_t s) {
  require(s >= 1 && r >= 2 * s, "noise reduction needs r >= 2s >= 2");
  return next_prime((r / s) * std::max<std::size_t>(ceil_log2(n), 1));
}

std::vector<std::size_t> NWMatrix::polynomial(std::size_t i) const {
  std::vector<std::size_t> coefficients(degree_bound + 1, 0);
  for (auto& c : coefficients) {
    c = i % beta;
    i /= beta;
  }
  return coefficients;
}

NWMatrix nw_matrix_for_field(std::size_t n, std::size_t beta) {
  require(n >= 1, "NW matrix needs at least one column");
  require(is_prime(beta), "NW field size must be prime, got " + std::to_string(beta));
  std::size_t degree_bound = 0;
  for (std::size_t capacity = beta; capacity < n; capacity *= beta) ++degree_bound;

  NWMatrix nw{beta, degree_bound, n, SparseBinaryMatrix(1, 1, {{0}})};
  std::vector<std::vector<RowIndex>> columns(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto q = nw.polynomial(i);
    auto& col = columns[i];
    col.reserve(beta);
    for (std::size_t a = 0; a < beta; ++a) {
      std::size_t value = 0;  // Horner evaluation mod beta
      for (std::size_t t = q.size(); t-- > 0;) value = (value * a + q[t]) % beta;
      col.push_back(static_cast<RowIndex>(a * beta + value));
    }
  }
  nw.matrix = SparseBinaryMatrix(beta * beta, n, std::move(columns));
  return nw;
}

NWMatrix build_nw_matrix(std::size_t n, std::size_t r, std::size_t s) {
  return nw_matrix_for_field(n, nw_field_size(n, r, s));
}

}  // namespace expsketch
