#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace expsketch {

using Vertex = std::uint32_t;
using NeighborList = std::vector<Vertex>;

/// Left-d-regular simple bipartite graph G = (A, B, E) with |A| = n_left, |B| = m_right.
///
/// Every left vertex owns exactly `degree` distinct right neighbors, stored strictly
/// increasing. Immutable after construction.
class BipartiteGraph {
 public:
  /// Validates all invariants; throws ParameterError on violation.
  BipartiteGraph(std::size_t n_left, std::size_t m_right, std::size_t degree,
                 std::vector<NeighborList> neighbors);

  std::size_t n_left() const { return neighbors_.size(); }
  std::size_t m_right() const { return m_right_; }
  std::size_t degree() const { return degree_; }

  std::span<const Vertex> neighbors(std::size_t left) const { return neighbors_.at(left); }
  const std::vector<NeighborList>& adjacency() const { return neighbors_; }

  friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;

 private:
  std::size_t m_right_;
  std::size_t degree_;
  std::vector<NeighborList> neighbors_;
};

/// Random left-regular graph: each left vertex draws d distinct right neighbors uniformly
/// without replacement. Identical arguments reproduce the identical graph.
BipartiteGraph sample_expander(std::size_t n, std::size_t m, std::size_t d, std::uint64_t seed);

/// N(X): union of the neighbor lists over X, sorted ascending.
std::vector<Vertex> neighborhood(const BipartiteGraph& g, std::span<const std::size_t> left_set);

/// Right-set size m = ceil(k * d / eps) for a (k, eps)-expander of left degree d, floored at d.
std::size_t expander_right_size(std::size_t k, std::size_t d, double eps);

}  // namespace expsketch
