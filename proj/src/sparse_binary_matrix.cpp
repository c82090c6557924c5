#include "expsketch/sparse_binary_matrix.hpp"

#include <bit>
#include <cmath>

namespace expsketch {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
constexpr std::size_t kMaxRows = std::size_t{1} << 32;

void fnv_mix(std::uint64_t& h, std::uint64_t value) {
  for (int byte = 0; byte < 8; ++byte) {
    h ^= (value >> (8 * byte)) & 0xffu;
    h *= kFnvPrime;
  }
}

void check_provenance(const Sketch& y, const SparseBinaryMatrix& phi) {
  require(static_cast<std::size_t>(y.values.size()) == phi.rows(),
          "sketch length does not match matrix rows");
  require(y.provenance == phi.fingerprint(), "sketch was not produced by this matrix");
}

}  // namespace

SparseBinaryMatrix::SparseBinaryMatrix(std::size_t rows, std::size_t cols,
                                       std::vector<std::vector<RowIndex>> columns, double scale)
    : rows_(rows), columns_(std::move(columns)), scale_(scale) {
  require(columns_.size() == cols, "column table has " + std::to_string(columns_.size()) +
                                       " entries, expected " + std::to_string(cols));
  require(std::isfinite(scale) && scale > 0, "matrix scale must be positive and finite");
  fingerprint_ = kFnvOffset;
  fnv_mix(fingerprint_, rows_);
  fnv_mix(fingerprint_, columns_.size());
  fnv_mix(fingerprint_, std::bit_cast<std::uint64_t>(scale_));
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto& col = columns_[j];
    for (std::size_t t = 0; t < col.size(); ++t) {
      require(col[t] < rows_, "column " + std::to_string(j) + " has out-of-range row index");
      require(t == 0 || col[t - 1] < col[t],
              "column " + std::to_string(j) + " row indices are not strictly increasing");
    }
    nnz_ += col.size();
    fnv_mix(fingerprint_, col.size());
    for (auto r : col) fnv_mix(fingerprint_, r);
  }
}

std::optional<std::size_t> SparseBinaryMatrix::column_degree() const {
  if (columns_.empty()) return std::nullopt;
  const auto d = columns_.front().size();
  for (const auto& col : columns_)
    if (col.size() != d) return std::nullopt;
  return d;
}

SparseBinaryMatrix SparseBinaryMatrix::with_scale(double scale) const {
  return SparseBinaryMatrix(rows_, cols(), columns_, scale);
}

SparseBinaryMatrix from_graph(const BipartiteGraph& g) {
  std::vector<std::vector<RowIndex>> columns(g.adjacency().begin(), g.adjacency().end());
  return SparseBinaryMatrix(g.m_right(), g.n_left(), std::move(columns));
}

Sketch apply(const SparseBinaryMatrix& phi, const Vector& x) {
  Vector y = multiply_binary(phi, x);
  if (phi.scale() != 1.0) y *= phi.scale();
  return Sketch{std::move(y), phi.fingerprint()};
}

Vector apply_transpose(const SparseBinaryMatrix& phi, const Vector& y) {
  require(static_cast<std::size_t>(y.size()) == phi.rows(), "vector length does not match rows");
  Vector out(static_cast<Index>(phi.cols()));
  for (std::size_t j = 0; j < phi.cols(); ++j) {
    double acc = 0.0;
    for (RowIndex r : phi.column(j)) acc += y(r);
    out(static_cast<Index>(j)) = phi.scale() * acc;
  }
  return out;
}

void update_in_place(Sketch& y, const SparseBinaryMatrix& phi, std::size_t j, double delta) {
  require(j < phi.cols(), "update index " + std::to_string(j) + " out of range");
  check_provenance(y, phi);
  const double step = delta * phi.scale();
  for (RowIndex r : phi.column(j)) y.values(r) += step;
}

Sketch update(const Sketch& y, const SparseBinaryMatrix& phi, std::size_t j, double delta) {
  Sketch out = y;
  update_in_place(out, phi, j, delta);
  return out;
}

SparseBinaryMatrix set_rip_p_scale(const SparseBinaryMatrix& phi, double p) {
  require(p >= 1.0 && p <= 2.0, "norm exponent must lie in [1, 2]");
  const auto d = phi.column_degree();
  require(d.has_value() && *d > 0, "RIP-p scaling needs a column-regular matrix");
  return phi.with_scale(std::pow(static_cast<double>(*d), -1.0 / p));
}

SparseBinaryMatrix row_tensor_product(const SparseBinaryMatrix& q, const SparseBinaryMatrix& r) {
  require(q.cols() == r.cols(), "row tensor product needs equal column counts");
  require(q.scale() == 1.0 && r.scale() == 1.0, "row tensor product needs unscaled operands");
  const auto r_rows = r.rows();
  require(r_rows == 0 || q.rows() <= kMaxRows / r_rows, "row tensor product exceeds 2^32 rows");
  std::vector<std::vector<RowIndex>> columns(q.cols());
  for (std::size_t j = 0; j < q.cols(); ++j) {
    auto& out = columns[j];
    out.reserve(q.column(j).size() * r.column(j).size());
    for (RowIndex a : q.column(j))
      for (RowIndex b : r.column(j)) out.push_back(static_cast<RowIndex>(a * r_rows + b));
  }
  return SparseBinaryMatrix(q.rows() * r_rows, q.cols(), std::move(columns));
}

SparseBinaryMatrix vstack(std::span<const SparseBinaryMatrix> blocks) {
  require(!blocks.empty(), "vstack needs at least one block");
  const auto cols = blocks.front().cols();
  const auto scale = blocks.front().scale();
  std::vector<std::vector<RowIndex>> columns(cols);
  std::size_t offset = 0;
  for (const auto& block : blocks) {
    require(block.cols() == cols, "vstack blocks must share a column count");
    require(block.scale() == scale, "vstack blocks must share a scale");
    for (std::size_t j = 0; j < cols; ++j)
      for (RowIndex r : block.column(j)) columns[j].push_back(static_cast<RowIndex>(offset + r));
    offset += block.rows();
    require(offset <= kMaxRows, "stacked matrix exceeds 2^32 rows");
  }
  return SparseBinaryMatrix(offset, cols, std::move(columns), scale);
}

Matrix to_dense(const SparseBinaryMatrix& phi) {
  Matrix dense = Matrix::Zero(static_cast<Index>(phi.rows()), static_cast<Index>(phi.cols()));
  for (std::size_t j = 0; j < phi.cols(); ++j)
    for (RowIndex r : phi.column(j)) dense(r, static_cast<Index>(j)) = phi.scale();
  return dense;
}

SparseBinaryMatrix from_dense_rows(const std::vector<std::vector<int>>& rows) {
  require(!rows.empty(), "need at least one row");
  const auto cols = rows.front().size();
  std::vector<std::vector<RowIndex>> columns(cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == cols, "ragged dense rows");
    for (std::size_t j = 0; j < cols; ++j) {
      require(rows[i][j] == 0 || rows[i][j] == 1, "dense rows must be 0-1");
      if (rows[i][j] == 1) columns[j].push_back(static_cast<RowIndex>(i));
    }
  }
  return SparseBinaryMatrix(rows.size(), cols, std::move(columns));
}

}  // namespace expsketch
