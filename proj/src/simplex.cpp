#include "dmilp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dmilp/errors.hpp"

namespace dmilp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr std::size_t kDegenerateRunLimit = 50;
constexpr std::size_t kRefactorInterval = 100;

// Working form: y = x - lb in [0, u], slack s >= 0 per row, artificial a >= 0
// for rows whose shifted rhs is negative:
//   A y + s - a = rhs - A lb.
class Tableau {
 public:
  Tableau(const LpProblem& lp, const LpTolerances& tol) : lp_(lp), tol_(tol) {
    n_ = lp.num_vars();
    r_ = lp.num_rows();
    Vector shifted(r_);
    for (std::size_t i = 0; i < r_; ++i) shifted[i] = lp.rhs[i] - dot(lp.constraints.row(i), lp.lb);

    std::vector<std::size_t> art_rows;
    for (std::size_t i = 0; i < r_; ++i)
      if (shifted[i] < 0.0) art_rows.push_back(i);
    k_ = art_rows.size();
    cols_ = n_ + r_ + k_;

    upper_.assign(cols_, kInf);
    for (std::size_t j = 0; j < n_; ++j) upper_[j] = std::max(0.0, lp.ub[j] - lp.lb[j]);

    original_ = Matrix(r_, cols_);
    for (std::size_t i = 0; i < r_; ++i) {
      const auto row = lp.constraints.row(i);
      std::copy(row.begin(), row.end(), original_.row(i).begin());
      original_(i, n_ + i) = 1.0;
    }
    original_rhs_ = shifted;

    basis_.assign(r_, kNone);
    position_.assign(cols_, kNone);
    at_upper_.assign(cols_, false);
    excluded_.assign(cols_, false);
    for (std::size_t i = 0; i < r_; ++i) basis_[i] = n_ + i;
    for (std::size_t a = 0; a < k_; ++a) {
      const std::size_t row = art_rows[a];
      original_(row, n_ + r_ + a) = -1.0;
      basis_[row] = n_ + r_ + a;
    }
    for (std::size_t i = 0; i < r_; ++i) position_[basis_[i]] = i;
    cost_.assign(cols_, 0.0);
  }

  std::size_t num_artificials() const { return k_; }

  // Phase 1: minimise the sum of artificials. Returns the residual infeasibility.
  double phase_one(std::size_t& iterations) {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (std::size_t a = 0; a < k_; ++a) cost_[n_ + r_ + a] = 1.0;
    refactor();
    optimise(iterations);
    double residual = 0.0;
    for (std::size_t a = 0; a < k_; ++a) residual += value_of(n_ + r_ + a);
    return residual;
  }

  void phase_two(std::size_t& iterations) {
    for (std::size_t a = 0; a < k_; ++a) {
      const std::size_t col = n_ + r_ + a;
      upper_[col] = 0.0;
      excluded_[col] = true;
      if (position_[col] != kNone) beta_[position_[col]] = 0.0;
      at_upper_[col] = false;
    }
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = lp_.objective[j];
    bland_ = false;
    refactor();
    optimise(iterations);
  }

  Vector solution() const {
    Vector x(n_);
    for (std::size_t j = 0; j < n_; ++j)
      x[j] = std::clamp(lp_.lb[j] + value_of(j), lp_.lb[j], lp_.ub[j]);
    return x;
  }

 private:
  double value_of(std::size_t col) const {
    if (position_[col] != kNone) return beta_[position_[col]];
    return at_upper_[col] ? upper_[col] : 0.0;
  }

  bool excluded(std::size_t col) const { return excluded_[col]; }

  // Rebuilds B^-1 [original] by Gauss-Jordan elimination on the current basis,
  // then recomputes basic values and reduced costs from scratch.
  void refactor() {
    table_ = original_;
    Vector rhs = original_rhs_;
    std::vector<bool> row_used(r_, false);
    std::vector<std::size_t> new_basis(r_, kNone);
    for (std::size_t b = 0; b < r_; ++b) {
      const std::size_t col = basis_[b];
      std::size_t best = kNone;
      double best_mag = 0.0;
      for (std::size_t i = 0; i < r_; ++i) {
        if (row_used[i]) continue;
        const double mag = std::abs(table_(i, col));
        if (mag > best_mag) {
          best_mag = mag;
          best = i;
        }
      }
      if (best == kNone || best_mag < tol_.pivot)
        throw NumericalBreakdown("simplex: singular basis during refactorization");
      row_used[best] = true;
      new_basis[best] = col;
      eliminate(best, col, &rhs);
    }
    basis_ = new_basis;
    std::fill(position_.begin(), position_.end(), kNone);
    for (std::size_t i = 0; i < r_; ++i) position_[basis_[i]] = i;

    beta_ = rhs;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (position_[j] != kNone || !at_upper_[j]) continue;
      for (std::size_t i = 0; i < r_; ++i) beta_[i] -= table_(i, j) * upper_[j];
    }
    reduced_.assign(cols_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) {
      double rc = cost_[j];
      for (std::size_t i = 0; i < r_; ++i) rc -= cost_[basis_[i]] * table_(i, j);
      reduced_[j] = rc;
    }
    since_refactor_ = 0;
  }

  void eliminate(std::size_t prow, std::size_t pcol, Vector* rhs) {
    const double pivot = table_(prow, pcol);
    auto pr = table_.row(prow);
    for (double& v : pr) v /= pivot;
    if (rhs) (*rhs)[prow] /= pivot;
    for (std::size_t i = 0; i < r_; ++i) {
      if (i == prow) continue;
      const double f = table_(i, pcol);
      if (f == 0.0) continue;
      auto row = table_.row(i);
      for (std::size_t j = 0; j < cols_; ++j) row[j] -= f * pr[j];
      row[pcol] = 0.0;
      if (rhs) (*rhs)[i] -= f * (*rhs)[prow];
    }
    pr[pcol] = 1.0;
  }

  std::size_t choose_entering(double dj_tol) const {
    std::size_t best = kNone;
    double best_score = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (position_[j] != kNone || upper_[j] <= 0.0 || excluded(j)) continue;
      const double rc = reduced_[j];
      const bool improving = at_upper_[j] ? rc > dj_tol : rc < -dj_tol;
      if (!improving) continue;
      if (bland_) return j;
      if (std::abs(rc) > best_score) {
        best_score = std::abs(rc);
        best = j;
      }
    }
    return best;
  }

  void optimise(std::size_t& iterations) {
    double cost_scale = 1.0;
    for (double c : cost_) cost_scale = std::max(cost_scale, std::abs(c));
    const double dj_tol = 1e-9 * cost_scale;
    const std::size_t cap = 1000 + 200 * (r_ + cols_);
    std::size_t degenerate_run = 0;

    for (std::size_t iter = 0;; ++iter) {
      if (iter > cap) throw NumericalBreakdown("simplex: iteration cap exceeded");
      const std::size_t q = choose_entering(dj_tol);
      if (q == kNone) return;
      ++iterations;
      const double dir = at_upper_[q] ? -1.0 : 1.0;

      // Ratio test: the entering variable moves by t >= 0 in direction dir.
      double t_max = upper_[q];
      std::size_t leave = kNone;
      bool leave_to_upper = false;
      double leave_mag = 0.0;
      for (std::size_t i = 0; i < r_; ++i) {
        const double a = dir * table_(i, q);
        if (std::abs(a) <= tol_.pivot) continue;
        const std::size_t col = basis_[i];
        double limit;
        bool to_upper;
        if (a > 0.0) {
          limit = std::max(0.0, beta_[i]) / a;
          to_upper = false;
        } else {
          if (upper_[col] == kInf) continue;
          limit = std::max(0.0, upper_[col] - beta_[i]) / (-a);
          to_upper = true;
        }
        bool take = false;
        if (limit < t_max - 1e-12) {
          take = true;
        } else if (limit <= t_max + 1e-12 && leave != kNone) {
          if (bland_) {
            take = col < basis_[leave];
          } else {
            take = std::abs(a) > leave_mag || (std::abs(a) == leave_mag && col < basis_[leave]);
          }
        }
        if (take) {
          t_max = std::min(t_max, limit);
          leave = i;
          leave_to_upper = to_upper;
          leave_mag = std::abs(a);
        }
      }
      if (t_max == kInf) throw NumericalBreakdown("simplex: unbounded direction on a bounded problem");

      degenerate_run = t_max <= 1e-12 ? degenerate_run + 1 : 0;
      if (degenerate_run > kDegenerateRunLimit) bland_ = true;

      for (std::size_t i = 0; i < r_; ++i) beta_[i] -= dir * t_max * table_(i, q);

      if (leave == kNone) {
        at_upper_[q] = !at_upper_[q];
        continue;
      }

      const std::size_t out = basis_[leave];
      const double entering_value = (at_upper_[q] ? upper_[q] : 0.0) + dir * t_max;
      position_[out] = kNone;
      at_upper_[out] = leave_to_upper;
      basis_[leave] = q;
      position_[q] = leave;
      at_upper_[q] = false;
      beta_[leave] = entering_value;

      const double rq = reduced_[q];
      eliminate(leave, q, nullptr);
      const auto pr = table_.row(leave);
      for (std::size_t j = 0; j < cols_; ++j) reduced_[j] -= rq * pr[j];
      reduced_[q] = 0.0;

      if (++since_refactor_ >= kRefactorInterval) refactor();
    }
  }

  const LpProblem& lp_;
  LpTolerances tol_;
  std::size_t n_ = 0, r_ = 0, k_ = 0, cols_ = 0;
  Matrix original_;
  Vector original_rhs_;
  Matrix table_;
  Vector beta_;
  Vector upper_;
  Vector cost_;
  Vector reduced_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> position_;
  std::vector<bool> at_upper_;
  std::vector<bool> excluded_;
  std::size_t since_refactor_ = 0;
  bool bland_ = false;
};

void check_shape(const LpProblem& lp) {
  const std::size_t n = lp.num_vars();
  if (lp.lb.size() != n || lp.ub.size() != n)
    throw PreconditionError("solve_lp: bounds length differs from objective length");
  if (lp.constraints.rows() != lp.rhs.size())
    throw PreconditionError("solve_lp: constraint rows differ from rhs length");
  if (lp.rhs.size() > 0 && lp.constraints.cols() != n)
    throw PreconditionError("solve_lp: constraint width differs from objective length");
  for (std::size_t j = 0; j < n; ++j)
    if (!std::isfinite(lp.lb[j]) || !std::isfinite(lp.ub[j]))
      throw PreconditionError("solve_lp: every variable needs finite bounds");
}

}  // namespace

bool lp_feasible(const LpProblem& problem, std::span<const double> x, double tol) {
  for (std::size_t j = 0; j < problem.num_vars(); ++j) {
    const double scale = std::max({1.0, std::abs(problem.lb[j]), std::abs(problem.ub[j])});
    if (x[j] < problem.lb[j] - tol * scale || x[j] > problem.ub[j] + tol * scale) return false;
  }
  for (std::size_t i = 0; i < problem.num_rows(); ++i) {
    const auto row = problem.constraints.row(i);
    double scale = std::max(1.0, std::abs(problem.rhs[i]));
    for (std::size_t j = 0; j < row.size(); ++j) scale = std::max(scale, std::abs(row[j] * x[j]));
    if (dot(row, x) > problem.rhs[i] + tol * scale) return false;
  }
  return true;
}

LpResult solve_lp(const LpProblem& problem, const LpTolerances& tol) {
  check_shape(problem);
  LpResult result;
  for (std::size_t j = 0; j < problem.num_vars(); ++j)
    if (problem.lb[j] > problem.ub[j]) return result;

  Tableau tableau(problem, tol);
  if (tableau.num_artificials() > 0) {
    double scale = 1.0;
    for (double v : problem.rhs) scale = std::max(scale, std::abs(v));
    if (tableau.phase_one(result.iterations) > tol.feas * scale) return result;
  }
  tableau.phase_two(result.iterations);

  result.x = tableau.solution();
  if (!lp_feasible(problem, result.x, std::max(tol.feas, 1e-7))) {
    throw NumericalBreakdown("simplex: recovered basic solution violates constraints");
  }
  result.status = LpStatus::Optimal;
  result.value = dot(problem.objective, result.x);
  result.is_vertex = true;
  return result;
}

}  // namespace dmilp
