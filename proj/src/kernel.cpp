#include "expsketch/kernel.hpp"

#include <cmath>
#include <vector>

namespace expsketch {

Matrix null_space_basis(const Matrix& A, double tol) {
  Matrix R = A;
  const Index m = R.rows();
  const Index n = R.cols();
  const double scale = std::max(1.0, m * n == 0 ? 0.0 : R.cwiseAbs().maxCoeff());
  std::vector<Index> pivot_cols;
  std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);

  Index row = 0;
  for (Index col = 0; col < n && row < m; ++col) {
    Index best;
    const double magnitude = R.col(col).segment(row, m - row).cwiseAbs().maxCoeff(&best);
    if (magnitude <= tol * scale) {
      R.col(col).segment(row, m - row).setZero();
      continue;
    }
    best += row;
    R.row(row).swap(R.row(best));
    R.row(row) /= R(row, col);
    for (Index r = 0; r < m; ++r) {
      if (r == row) continue;
      const double f = R(r, col);
      if (f != 0.0) R.row(r) -= f * R.row(row);
    }
    pivot_cols.push_back(col);
    is_pivot[static_cast<std::size_t>(col)] = true;
    ++row;
  }

  const Index nullity = n - static_cast<Index>(pivot_cols.size());
  Matrix basis = Matrix::Zero(n, nullity);
  Index out = 0;
  for (Index free = 0; free < n; ++free) {
    if (is_pivot[static_cast<std::size_t>(free)]) continue;
    basis(free, out) = 1.0;
    for (std::size_t p = 0; p < pivot_cols.size(); ++p)
      basis(pivot_cols[p], out) = -R(static_cast<Index>(p), free);
    ++out;
  }
  return basis;
}

}  // namespace expsketch
