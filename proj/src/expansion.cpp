#include "expsketch/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "expsketch/errors.hpp"
#include "expsketch/random.hpp"
#include "expsketch/simplex.hpp"

namespace expsketch {
namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return b > kSaturated - a ? kSaturated : a + b;
}

/// Defect of a set as the exact fraction collisions / (d * size).
struct Defect {
  std::uint64_t collisions = 0;
  std::uint64_t size = 0;

  bool greater_than(const Defect& other) const {
    if (other.size == 0) return size != 0;
    return collisions * other.size > other.collisions * size;
  }
  double value(std::size_t d) const {
    return size == 0 ? 0.0 : static_cast<double>(collisions) / static_cast<double>(d * size);
  }
};

/// Depth-first enumeration of subsets in lexicographic order, maintaining per-right-vertex
/// hit counts so each step costs O(d).
class SubsetEnumerator {
 public:
  SubsetEnumerator(const BipartiteGraph& g, std::size_t k, const ExhaustiveOptions& options)
      : g_(g), k_(k), options_(options), hits_(g.m_right(), 0) {}

  ExpansionReport run() {
    current_.reserve(k_);
    descend(0);
    ExpansionReport report;
    report.k_tested = k_;
    report.epsilon_hat = best_.value(g_.degree());
    report.worst_set = best_set_;
    report.exhaustive = !stopped_;
    report.stopped_early = stopped_;
    report.subsets_examined = visited_;
    return report;
  }

 private:
  void descend(std::size_t start) {
    for (std::size_t i = start; i < g_.n_left() && !stopped_; ++i) {
      if (++visited_ > options_.budget)
        throw BudgetError("expansion enumeration exceeded budget of " +
                          std::to_string(options_.budget) + " subsets");
      std::size_t added = 0;
      for (Vertex r : g_.neighbors(i))
        if (hits_[r]++ == 0) ++added;
      distinct_ += added;
      current_.push_back(i);

      const Defect defect{g_.degree() * current_.size() - distinct_, current_.size()};
      if (best_set_.empty() || defect.greater_than(best_)) {
        best_ = defect;
        best_set_ = current_;
        if (options_.stop_at && defect.value(g_.degree()) >= *options_.stop_at) stopped_ = true;
      }
      if (current_.size() < k_ && !stopped_) descend(i + 1);

      current_.pop_back();
      distinct_ -= added;
      for (Vertex r : g_.neighbors(i)) --hits_[r];
    }
  }

  const BipartiteGraph& g_;
  std::size_t k_;
  ExhaustiveOptions options_;
  std::vector<std::uint32_t> hits_;
  std::vector<std::size_t> current_;
  std::size_t distinct_ = 0;
  Defect best_;
  std::vector<std::size_t> best_set_;
  std::uint64_t visited_ = 0;
  bool stopped_ = false;
};

std::size_t clamp_k(std::size_t k, std::size_t n, bool& clamped) {
  require(k >= 1, "sparsity k must be at least 1");
  clamped = k > n;
  return std::min(k, n);
}

}  // namespace

std::uint64_t subset_count(std::size_t n, std::size_t k, std::uint64_t weight) {
  std::uint64_t total = 0;
  std::uint64_t binom = 1;  // C(n, s), built incrementally
  std::uint64_t power = 1;
  for (std::size_t s = 1; s <= std::min(k, n); ++s) {
    // C(n, s) = C(n, s-1) * (n - s + 1) / s; exact in long double for desk sizes.
    const long double next = static_cast<long double>(binom) * static_cast<long double>(n - s + 1) /
                             static_cast<long double>(s);
    binom = next >= static_cast<long double>(kSaturated) ? kSaturated
                                                          : static_cast<std::uint64_t>(std::llround(next));
    power = saturating_mul(power, weight);
    total = saturating_add(total, saturating_mul(binom, power));
  }
  return total;
}

ExpansionReport check_expansion_exact(const BipartiteGraph& g, std::size_t k,
                                      const ExhaustiveOptions& options) {
  bool clamped = false;
  k = clamp_k(k, g.n_left(), clamped);
  if (!options.stop_at) {
    const auto work = subset_count(g.n_left(), k);
    if (work > options.budget)
      throw BudgetError("exhaustive expansion check needs " + std::to_string(work) +
                        " subsets, budget is " + std::to_string(options.budget));
  }
  auto report = SubsetEnumerator(g, k, options).run();
  report.clamped = clamped;
  return report;
}

ExpansionReport check_expansion_sampled(const BipartiteGraph& g, std::size_t k, std::size_t trials,
                                        std::uint64_t seed) {
  require(trials >= 1, "sampled expansion check needs at least one trial");
  bool clamped = false;
  k = clamp_k(k, g.n_left(), clamped);
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> size_dist(1, k);
  ExpansionReport report;
  report.k_tested = k;
  report.clamped = clamped;
  Defect best;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto size = size_dist(rng);
    const auto drawn = sample_without_replacement(static_cast<std::uint32_t>(g.n_left()),
                                                  static_cast<std::uint32_t>(size), rng);
    const std::vector<std::size_t> set(drawn.begin(), drawn.end());
    const Defect defect{g.degree() * size - neighborhood(g, set).size(), size};
    const bool better = report.worst_set.empty() || defect.greater_than(best) ||
                        (!best.greater_than(defect) && set < report.worst_set);
    if (better) {
      best = defect;
      report.worst_set = set;
    }
  }
  report.epsilon_hat = best.value(g.degree());
  report.subsets_examined = trials;
  return report;
}

double epsilon_from_rip1_delta(double delta) {
  require(delta >= 0.0, "RIP-1 distortion must be non-negative");
  if (std::isinf(delta)) return 1.0 / (2.0 - std::sqrt(2.0));
  return (1.0 - 1.0 / (1.0 + delta)) / (2.0 - std::sqrt(2.0));
}

Rip1Bounds rip1_constant_exact(const SparseBinaryMatrix& phi, std::size_t k,
                               const ExhaustiveOptions& options) {
  require(phi.scale() == 1.0, "exact RIP-1 computation needs an unscaled binary matrix");
  const auto degree = phi.column_degree();
  require(degree.has_value() && *degree > 0, "exact RIP-1 computation needs a column-regular matrix");
  require(k >= 1, "sparsity k must be at least 1");
  const std::size_t n = phi.cols();
  k = std::min(k, n);
  // One sign per pattern pair is enough: sigma and -sigma give the same ratio.
  const auto work = subset_count(n, k, 2) / 2 + 1;
  if (work > options.budget)
    throw BudgetError("exact RIP-1 computation needs " + std::to_string(work) +
                      " programs, budget is " + std::to_string(options.budget));

  const double d = static_cast<double>(*degree);
  Rip1Bounds bounds;
  bounds.lo = std::numeric_limits<double>::infinity();
  bounds.hi = 0.0;
  // The ratio is convex on each face, so its maximum sits at a vertex +-e_i: exactly 1.
  for (std::size_t j = 0; j < n; ++j)
    bounds.hi = std::max(bounds.hi, static_cast<double>(phi.column(j).size()) / d);

  std::vector<std::size_t> support;
  SimplexOptions simplex;
  simplex.feasibility_tol = 1e-11;

  const auto solve_face = [&](const std::vector<int>& signs) {
    std::vector<RowIndex> rows;
    for (auto j : support) rows.insert(rows.end(), phi.column(j).begin(), phi.column(j).end());
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    const Index s = static_cast<Index>(support.size());
    const Index r = static_cast<Index>(rows.size());
    // Variables: w (s), p (r), q (r). Rows: one per touched measurement, plus sum w = 1.
    Matrix A = Matrix::Zero(r + 1, s + 2 * r);
    Vector b = Vector::Zero(r + 1);
    Vector c = Vector::Zero(s + 2 * r);
    for (Index t = 0; t < s; ++t) {
      for (RowIndex row : phi.column(support[static_cast<std::size_t>(t)])) {
        const auto pos = std::lower_bound(rows.begin(), rows.end(), row) - rows.begin();
        A(pos, t) = signs[static_cast<std::size_t>(t)];
      }
      A(r, t) = 1.0;
    }
    for (Index t = 0; t < r; ++t) {
      A(t, s + t) = -1.0;
      A(t, s + r + t) = 1.0;
    }
    c.tail(2 * r).setOnes();
    b(r) = 1.0;
    const auto lp = solve_standard_form(A, b, c, simplex);
    if (lp.status != LpStatus::optimal)
      throw std::runtime_error("RIP-1 face program did not solve: " + std::string(to_string(lp.status)));
    ++bounds.programs_solved;
    const double ratio = lp.objective / d;
    if (ratio < bounds.lo - 1e-12) {
      bounds.lo = ratio;
      bounds.worst_support = support;
      bounds.worst_signs = signs;
    }
  };

  const auto enumerate_signs = [&]() {
    const std::size_t s = support.size();
    std::vector<int> signs(s, 1);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (s - 1)); ++mask) {
      for (std::size_t t = 1; t < s; ++t) signs[t] = (mask >> (t - 1)) & 1u ? -1 : 1;
      solve_face(signs);
    }
  };

  const auto descend = [&](auto&& self, std::size_t start) -> void {
    for (std::size_t i = start; i < n; ++i) {
      support.push_back(i);
      enumerate_signs();
      if (support.size() < k) self(self, i + 1);
      support.pop_back();
    }
  };
  descend(descend, 0);

  if (bounds.lo < 1e-12) bounds.lo = 0.0;
  bounds.delta = bounds.lo > 0.0 ? bounds.hi / bounds.lo - 1.0 : std::numeric_limits<double>::infinity();
  return bounds;
}

}  // namespace expsketch
