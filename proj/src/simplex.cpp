#include "expsketch/simplex.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

#include "expsketch/errors.hpp"

namespace expsketch {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::budget_exceeded: return "budget-exceeded";
  }
  return "unknown";
}

namespace {

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class PhaseOutcome { optimal, unbounded, budget };

class Tableau2Phase {
 public:
  Tableau2Phase(const Matrix& A, const Vector& b, const SimplexOptions& options)
      : options_(options), T_(A), rhs_(b), m_(A.rows()), n_(A.cols()) {
    basis_.assign(static_cast<std::size_t>(m_), -1);
    active_.assign(static_cast<std::size_t>(m_), true);
    basic_.assign(static_cast<std::size_t>(n_), false);
    rejected_.assign(static_cast<std::size_t>(n_), false);
    for (Index i = 0; i < m_; ++i) {
      basis_[static_cast<std::size_t>(i)] = n_ + i;  // artificial
      if (rhs_(i) < 0) {
        T_.row(i) *= -1.0;
        rhs_(i) = -rhs_(i);
      }
    }
    A0_ = T_;
    b0_ = rhs_;
  }

  std::size_t pivots() const { return pivots_; }
  std::size_t bland_pivots() const { return bland_pivots_; }

  PhaseOutcome phase_one() {
    phase_two_ = false;
    price();
    return iterate();
  }

  double artificial_mass() const {
    double mass = 0.0;
    for (Index i = 0; i < m_; ++i)
      if (is_artificial(basis_[static_cast<std::size_t>(i)])) mass += rhs_(i);
    return mass;
  }

  /// Pivots remaining zero-level artificials out of the basis; rows that cannot be
  /// pivoted are linearly dependent and get deactivated.
  void drive_out_artificials() {
    for (Index i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
      rhs_(i) = 0.0;
      Index best = -1;
      double best_abs = options_.pivot_tol;
      for (Index j = 0; j < n_; ++j) {
        const double a = std::abs(T_(i, j));
        if (a > best_abs && !is_basic(j)) {
          best_abs = a;
          best = j;
        }
      }
      if (best < 0) {
        active_[static_cast<std::size_t>(i)] = false;
        T_.row(i).setZero();
      } else {
        pivot(i, best);
      }
    }
  }

  PhaseOutcome phase_two(const Vector& c) {
    phase_two_ = true;
    cost_ = c;
    std::fill(rejected_.begin(), rejected_.end(), false);
    reinvert();
    return iterate();
  }

  Vector primal() const {
    Vector z = Vector::Zero(n_);
    for (Index i = 0; i < m_; ++i) {
      const Index j = basis_[static_cast<std::size_t>(i)];
      if (active_[static_cast<std::size_t>(i)] && !is_artificial(j)) z(j) = std::max(0.0, rhs_(i));
    }
    return z;
  }

  std::vector<Index> structural_basis() const {
    std::vector<Index> out(static_cast<std::size_t>(m_), -1);
    for (Index i = 0; i < m_; ++i) {
      const Index j = basis_[static_cast<std::size_t>(i)];
      if (active_[static_cast<std::size_t>(i)] && !is_artificial(j)) out[static_cast<std::size_t>(i)] = j;
    }
    return out;
  }

 private:
  bool is_artificial(Index j) const { return j >= n_; }

  bool is_basic(Index j) const { return basic_[static_cast<std::size_t>(j)]; }

  /// Basic columns never enter: round-off can leave their reduced cost slightly negative, and
  /// re-entering one would duplicate it in the basis. Rejected columns had no admissible pivot
  /// at the current basis.
  bool candidate(Index j) const {
    return !is_basic(j) && !rejected_[static_cast<std::size_t>(j)];
  }

  Index choose_entering(bool bland) const {
    const double tol = options_.optimality_tol;
    if (bland) {
      for (Index j = 0; j < n_; ++j)
        if (reduced_(j) < -tol && candidate(j)) return j;
      return -1;
    }
    Index best = -1;
    double most_negative = -tol;
    for (Index j = 0; j < n_; ++j) {
      if (reduced_(j) < most_negative && candidate(j)) {
        most_negative = reduced_(j);
        best = j;
      }
    }
    return best;
  }

  Index choose_leaving(Index q, bool bland) const {
    Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    double best_pivot = 0.0;
    for (Index i = 0; i < m_; ++i) {
      if (!active_[static_cast<std::size_t>(i)]) continue;
      const double a = T_(i, q);
      if (a <= options_.pivot_tol) continue;
      const double ratio = std::max(0.0, rhs_(i)) / a;
      const double slack = leave < 0 ? 0.0 : 1e-12 * (1.0 + best_ratio);
      if (leave < 0 || ratio < best_ratio - slack) {
        leave = i;
        best_ratio = ratio;
        best_pivot = a;
      } else if (ratio <= best_ratio + slack) {
        const bool take = bland ? basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]
                                : a > best_pivot;
        if (take) {
          leave = i;
          best_pivot = a;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
    }
    return leave;
  }

  void pivot(Index i, Index q) {
    const double piv = T_(i, q);
    T_.row(i) /= piv;
    rhs_(i) /= piv;
    T_(i, q) = 1.0;
    for (Index r = 0; r < m_; ++r) {
      if (r == i) continue;
      const double f = T_(r, q);
      if (f == 0.0) continue;
      T_.row(r).noalias() -= f * T_.row(i);
      rhs_(r) -= f * rhs_(i);
      T_(r, q) = 0.0;
      if (rhs_(r) < 0.0 && rhs_(r) > -options_.feasibility_tol) rhs_(r) = 0.0;
    }
    const double dq = reduced_(q);
    if (dq != 0.0) {
      reduced_.noalias() -= dq * T_.row(i).transpose();
      objective_ += dq * rhs_(i);
    }
    reduced_(q) = 0.0;
    const Index leaving = basis_[static_cast<std::size_t>(i)];
    if (!is_artificial(leaving)) basic_[static_cast<std::size_t>(leaving)] = false;
    basic_[static_cast<std::size_t>(q)] = true;
    basis_[static_cast<std::size_t>(i)] = q;
    std::fill(rejected_.begin(), rejected_.end(), false);
    ++pivots_;
  }

  /// Reduced costs and objective of the current basis for the active phase, from T_ and rhs_.
  void price() {
    if (!phase_two_) {
      reduced_ = Vector::Zero(n_);
      objective_ = 0.0;
      for (Index i = 0; i < m_; ++i) {
        if (!active_[static_cast<std::size_t>(i)] || !is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
        reduced_.noalias() -= T_.row(i).transpose();
        objective_ += rhs_(i);
      }
      return;
    }
    reduced_ = cost_;
    objective_ = 0.0;
    for (Index i = 0; i < m_; ++i) {
      const Index j = basis_[static_cast<std::size_t>(i)];
      if (!active_[static_cast<std::size_t>(i)] || is_artificial(j)) continue;
      const double cj = cost_(j);
      if (cj != 0.0) {
        reduced_.noalias() -= cj * T_.row(i).transpose();
        objective_ += cj * rhs_(i);
      }
    }
    for (Index i = 0; i < m_; ++i) {
      const Index j = basis_[static_cast<std::size_t>(i)];
      if (active_[static_cast<std::size_t>(i)] && !is_artificial(j)) reduced_(j) = 0.0;
    }
  }

  /// Rebuilds T_ = B^{-1} A0 and rhs_ = B^{-1} b0 from the original system, discarding the
  /// round-off that accumulates over long pivot sequences.
  void reinvert() {
    Matrix B = Matrix::Zero(m_, m_);
    for (Index i = 0; i < m_; ++i) {
      const Index j = basis_[static_cast<std::size_t>(i)];
      if (is_artificial(j))
        B(j - n_, i) = 1.0;
      else
        B.col(i) = A0_.col(j);
    }
    const Eigen::PartialPivLU<Matrix> lu(B);
    T_ = lu.solve(Matrix(A0_));
    rhs_ = lu.solve(b0_);
    for (Index i = 0; i < m_; ++i) {
      if (!active_[static_cast<std::size_t>(i)]) {
        T_.row(i).setZero();
        rhs_(i) = 0.0;
        continue;
      }
      if (rhs_(i) < 0.0 && rhs_(i) > -options_.feasibility_tol) rhs_(i) = 0.0;
      const Index j = basis_[static_cast<std::size_t>(i)];
      if (!is_artificial(j)) {
        T_.col(j).setZero();
        T_(i, j) = 1.0;
      }
    }
    price();
    since_reinvert_ = 0;
  }

  PhaseOutcome iterate() {
    // Bland's rule, once engaged, stays on until the objective makes real progress: round-off
    // alone must not switch it off, or Dantzig pricing can resume a degenerate cycle.
    bool bland = false;
    std::size_t stalled = 0;
    double best = objective_;
    while (true) {
      if (since_reinvert_ >= kReinvertInterval) reinvert();
      Index q = choose_entering(bland);
      if (q < 0 && since_reinvert_ > 0) {
        reinvert();  // confirm optimality on a clean tableau
        q = choose_entering(bland);
      }
      if (q < 0) return PhaseOutcome::optimal;
      const Index i = choose_leaving(q, bland);
      if (i < 0) {
        if (since_reinvert_ > 0) {
          reinvert();
          continue;
        }
        // Phase 1 is bounded below by zero, and a round-off-sized reduced cost is no ray.
        // Either way the column is noise at this basis, so pricing moves on.
        if (!phase_two_ || reduced_(q) > -kRayTol * (1.0 + cost_.cwiseAbs().maxCoeff())) {
          rejected_[static_cast<std::size_t>(q)] = true;
          continue;
        }
        return PhaseOutcome::unbounded;
      }
      if (pivots_ >= options_.pivot_budget) return PhaseOutcome::budget;
      if (bland) ++bland_pivots_;
      pivot(i, q);
      ++since_reinvert_;
      if (objective_ < best - 1e-9 * (1.0 + std::abs(best))) {
        best = objective_;
        stalled = 0;
        bland = false;
      } else if (++stalled >= options_.stall_limit) {
        bland = true;
      }
    }
  }

  static constexpr std::size_t kReinvertInterval = 64;
  static constexpr double kRayTol = 1e-7;

  SimplexOptions options_;
  Tableau T_;
  Matrix A0_;  // sign-normalized original rows
  Vector b0_;
  Vector cost_;
  bool phase_two_ = false;
  std::size_t since_reinvert_ = 0;
  Vector rhs_;
  Vector reduced_;
  Index m_;
  Index n_;
  double objective_ = 0.0;
  std::vector<Index> basis_;
  std::vector<bool> active_;
  std::vector<bool> basic_;
  std::vector<bool> rejected_;
  std::size_t pivots_ = 0;
  std::size_t bland_pivots_ = 0;
};

/// Recomputes basic values from the original system; keeps whichever solution has the
/// smaller equality residual.
Vector refine_basic_solution(const Matrix& A, const Vector& b, const std::vector<Index>& basis,
                             const Vector& tableau_solution, double feasibility_tol) {
  std::vector<Index> cols;
  for (Index j : basis)
    if (j >= 0) cols.push_back(j);
  if (cols.empty()) return tableau_solution;
  Matrix AB(A.rows(), static_cast<Index>(cols.size()));
  for (std::size_t t = 0; t < cols.size(); ++t) AB.col(static_cast<Index>(t)) = A.col(cols[t]);
  const Vector zB = AB.colPivHouseholderQr().solve(b);
  Vector refined = Vector::Zero(A.cols());
  for (std::size_t t = 0; t < cols.size(); ++t) {
    const double v = zB(static_cast<Index>(t));
    if (v < -feasibility_tol) return tableau_solution;
    refined(cols[t]) = std::max(0.0, v);
  }
  const double r_old = (A * tableau_solution - b).cwiseAbs().maxCoeff();
  const double r_new = (A * refined - b).cwiseAbs().maxCoeff();
  return r_new <= r_old ? refined : tableau_solution;
}

}  // namespace

SimplexResult solve_standard_form(const Matrix& A, const Vector& b, const Vector& c,
                                  const SimplexOptions& options) {
  require(A.rows() == b.size(), "constraint matrix and right-hand side disagree in length");
  require(A.cols() == c.size(), "constraint matrix and cost vector disagree in length");
  SimplexResult result;
  if (A.rows() == 0) {
    result.solution = Vector::Zero(A.cols());
    result.status = (c.array() < 0).any() ? LpStatus::unbounded : LpStatus::optimal;
    return result;
  }

  Tableau2Phase tableau(A, b, options);
  const auto finish = [&](LpStatus status) {
    result.status = status;
    result.pivots = tableau.pivots();
    result.bland_pivots = tableau.bland_pivots();
    result.basis = tableau.structural_basis();
    result.solution = tableau.primal();
    if (status == LpStatus::optimal && options.refine)
      result.solution =
          refine_basic_solution(A, b, result.basis, result.solution, options.feasibility_tol);
    result.objective = c.dot(result.solution);
    return result;
  };

  const auto phase1 = tableau.phase_one();
  if (phase1 == PhaseOutcome::budget) return finish(LpStatus::budget_exceeded);
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (tableau.artificial_mass() > options.feasibility_tol * scale) return finish(LpStatus::infeasible);
  tableau.drive_out_artificials();

  switch (tableau.phase_two(c)) {
    case PhaseOutcome::optimal: return finish(LpStatus::optimal);
    case PhaseOutcome::unbounded: return finish(LpStatus::unbounded);
    case PhaseOutcome::budget: return finish(LpStatus::budget_exceeded);
  }
  return finish(LpStatus::infeasible);
}

}  // namespace expsketch
