#include "expsketch/bipartite_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "expsketch/errors.hpp"
#include "expsketch/random.hpp"

namespace expsketch {

BipartiteGraph::BipartiteGraph(std::size_t n_left, std::size_t m_right, std::size_t degree,
                               std::vector<NeighborList> neighbors)
    : m_right_(m_right), degree_(degree), neighbors_(std::move(neighbors)) {
  require(n_left >= 1, "graph needs at least one left vertex");
  require(degree >= 1 && degree <= m_right, "graph degree must satisfy 1 <= d <= m");
  require(neighbors_.size() == n_left, "neighbor table has " + std::to_string(neighbors_.size()) +
                                           " lists, expected " + std::to_string(n_left));
  for (std::size_t i = 0; i < neighbors_.size(); ++i) {
    const auto& list = neighbors_[i];
    require(list.size() == degree, "left vertex " + std::to_string(i) + " has degree " +
                                       std::to_string(list.size()) + ", expected " +
                                       std::to_string(degree));
    for (std::size_t t = 0; t < list.size(); ++t) {
      require(list[t] < m_right, "left vertex " + std::to_string(i) + " has out-of-range neighbor");
      require(t == 0 || list[t - 1] < list[t],
              "neighbors of left vertex " + std::to_string(i) + " are not strictly increasing");
    }
  }
}

std::vector<std::uint32_t> sample_without_replacement(std::uint32_t population, std::uint32_t count,
                                                      Rng& rng) {
  require(count <= population, "cannot draw " + std::to_string(count) + " distinct values from " +
                                   std::to_string(population));
  std::vector<std::uint32_t> out;
  out.reserve(count);
  if (static_cast<std::uint64_t>(count) * 4 >= population) {
    std::vector<std::uint32_t> pool(population);
    std::iota(pool.begin(), pool.end(), 0u);
    for (std::uint32_t t = 0; t < count; ++t) {
      std::uniform_int_distribution<std::uint32_t> pick(t, population - 1);
      std::swap(pool[t], pool[pick(rng)]);
      out.push_back(pool[t]);
    }
  } else {
    std::uniform_int_distribution<std::uint32_t> pick(0, population - 1);
    while (out.size() < count) {
      const auto v = pick(rng);
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

BipartiteGraph sample_expander(std::size_t n, std::size_t m, std::size_t d, std::uint64_t seed) {
  require(d >= 1, "degree must be positive");
  require(d <= m, "degree d = " + std::to_string(d) + " exceeds right size m = " + std::to_string(m));
  require(n >= 1, "need at least one left vertex");
  Rng rng(seed);
  std::vector<NeighborList> neighbors(n);
  for (auto& list : neighbors)
    list = sample_without_replacement(static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(d), rng);
  return BipartiteGraph(n, m, d, std::move(neighbors));
}

std::vector<Vertex> neighborhood(const BipartiteGraph& g, std::span<const std::size_t> left_set) {
  std::vector<Vertex> out;
  for (auto i : left_set) {
    require(i < g.n_left(), "left index " + std::to_string(i) + " out of range");
    const auto nb = g.neighbors(i);
    out.insert(out.end(), nb.begin(), nb.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t expander_right_size(std::size_t k, std::size_t d, double eps) {
  require(eps > 0, "expansion defect must be positive");
  const auto m = static_cast<std::size_t>(std::ceil(static_cast<double>(k * d) / eps - 1e-9));
  return std::max(m, d);
}

}  // namespace expsketch
