#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace expsketch {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// l_p norm for p >= 1 (p = infinity allowed).
template <typename Derived>
typename Derived::RealScalar lp_norm(const Eigen::MatrixBase<Derived>& x, double p) {
  using Real = typename Derived::RealScalar;
  if (std::isinf(p)) return x.size() == 0 ? Real(0) : x.cwiseAbs().maxCoeff();
  if (p == 1.0) return x.cwiseAbs().sum();
  if (p == 2.0) return x.norm();
  Real acc = 0;
  for (Index i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x(i)), p);
  return std::pow(acc, Real(1) / p);
}

/// Indices of the t largest-magnitude entries; ties go to the lower index.
template <typename Derived>
std::vector<Index> top_indices(const Eigen::MatrixBase<Derived>& x, std::size_t t) {
  std::vector<Index> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), Index{0});
  t = std::min(t, order.size());
  auto by_magnitude = [&](Index a, Index b) {
    const auto ma = std::abs(x(a));
    const auto mb = std::abs(x(b));
    return ma != mb ? ma > mb : a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(t), order.end(),
                    by_magnitude);
  order.resize(t);
  return order;
}

/// Best t-term approximation (the head x_t).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> head(const Eigen::MatrixBase<Derived>& x,
                                                                std::size_t t) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out =
      Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>::Zero(x.size());
  for (Index i : top_indices(x, t)) out(i) = x(i);
  return out;
}

/// x - x_t.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> tail(const Eigen::MatrixBase<Derived>& x,
                                                                std::size_t t) {
  return x - head(x, t);
}

template <typename Derived>
std::size_t count_nonzeros(const Eigen::MatrixBase<Derived>& x, double tol = 0.0) {
  std::size_t count = 0;
  for (Index i = 0; i < x.size(); ++i)
    if (std::abs(x(i)) > tol) ++count;
  return count;
}

/// ceil(log2(n)) for n >= 1.
constexpr std::size_t ceil_log2(std::size_t n) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

}  // namespace expsketch
