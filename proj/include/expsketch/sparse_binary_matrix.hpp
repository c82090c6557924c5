#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expsketch/bipartite_graph.hpp"
#include "expsketch/errors.hpp"
#include "expsketch/signal.hpp"

namespace expsketch {

using RowIndex = std::uint32_t;

/// 0-1 matrix in column-adjacency form with a positive scale applied on application.
///
/// Column j lists, strictly increasing, the rows holding a one. The scale is metadata:
/// integer sketches stay exact when it is 1. Immutable; safe to share across threads.
class SparseBinaryMatrix {
 public:
  SparseBinaryMatrix(std::size_t rows, std::size_t cols, std::vector<std::vector<RowIndex>> columns,
                     double scale = 1.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }
  double scale() const { return scale_; }
  std::size_t nnz() const { return nnz_; }
  std::span<const RowIndex> column(std::size_t j) const { return columns_.at(j); }
  const std::vector<std::vector<RowIndex>>& columns() const { return columns_; }

  /// Common column sum when every column has the same number of ones.
  std::optional<std::size_t> column_degree() const;

  /// Structural hash over shape, scale and pattern; identifies the producer of a sketch.
  std::uint64_t fingerprint() const { return fingerprint_; }

  SparseBinaryMatrix with_scale(double scale) const;

  friend bool operator==(const SparseBinaryMatrix& a, const SparseBinaryMatrix& b) {
    return a.rows_ == b.rows_ && a.scale_ == b.scale_ && a.columns_ == b.columns_;
  }

 private:
  std::size_t rows_;
  std::vector<std::vector<RowIndex>> columns_;
  double scale_;
  std::size_t nnz_ = 0;
  std::uint64_t fingerprint_ = 0;
};

/// Measurement vector y = phi x, tagged with the fingerprint of phi.
struct Sketch {
  Vector values;
  std::uint64_t provenance = 0;
};

SparseBinaryMatrix from_graph(const BipartiteGraph& g);

/// Unscaled binary product, exact in the input scalar type (e.g. integer signals).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> multiply_binary(
    const SparseBinaryMatrix& phi, const Eigen::MatrixBase<Derived>& x) {
  require(static_cast<std::size_t>(x.size()) == phi.cols(),
          "signal length " + std::to_string(x.size()) + " does not match " +
              std::to_string(phi.cols()) + " columns");
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(static_cast<Index>(phi.rows()));
  for (std::size_t j = 0; j < phi.cols(); ++j) {
    const Scalar xj = x(static_cast<Index>(j));
    if (xj == Scalar(0)) continue;
    for (RowIndex r : phi.column(j)) y(r) += xj;
  }
  return y;
}

/// y = scale * phi * x. Cost O(nnz).
Sketch apply(const SparseBinaryMatrix& phi, const Vector& x);

/// scale * phi^T y.
Vector apply_transpose(const SparseBinaryMatrix& phi, const Vector& y);

/// y + delta * scale * column j; touches exactly the ones of column j.
Sketch update(const Sketch& y, const SparseBinaryMatrix& phi, std::size_t j, double delta);
void update_in_place(Sketch& y, const SparseBinaryMatrix& phi, std::size_t j, double delta);

/// Sets scale = d^{-1/p}, normalizing columns to unit l_p norm.
SparseBinaryMatrix set_rip_p_scale(const SparseBinaryMatrix& phi, double p);

/// Row tensor product q (*) r: row (a, b) at index a * r.rows() + b is the entrywise product
/// of q-row a and r-row b. Both operands must be unscaled.
SparseBinaryMatrix row_tensor_product(const SparseBinaryMatrix& q, const SparseBinaryMatrix& r);

/// Stacks matrices with a common column count, top to bottom. All must share one scale.
SparseBinaryMatrix vstack(std::span<const SparseBinaryMatrix> blocks);

/// Dense copy including the scale.
Matrix to_dense(const SparseBinaryMatrix& phi);

/// Matrix whose rows are the given 0-1 rows (each of length cols).
SparseBinaryMatrix from_dense_rows(const std::vector<std::vector<int>>& rows);

}  // namespace expsketch
