#include <algorithm>
#include <cmath>

#include "dmilp/errors.hpp"
#include "dmilp/simplex.hpp"

namespace dmilp {

namespace {

enum class VarState { AtLower, AtUpper, Free };

// Solves the k x k system in place with partial pivoting; false if singular.
bool solve_square(std::vector<double>& m, std::vector<double>& rhs, std::size_t k) {
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::abs(m[r * k + col]) > std::abs(m[piv * k + col])) piv = r;
    if (std::abs(m[piv * k + col]) < 1e-11) return false;
    if (piv != col) {
      for (std::size_t c = 0; c < k; ++c) std::swap(m[piv * k + c], m[col * k + c]);
      std::swap(rhs[piv], rhs[col]);
    }
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = m[r * k + col] / m[col * k + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < k; ++c) m[r * k + c] -= f * m[col * k + c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t r = 0; r < k; ++r) rhs[r] /= m[r * k + r];
  return true;
}

bool same_point(const Vector& a, const Vector& b, double tol) {
  for (std::size_t j = 0; j < a.size(); ++j)
    if (std::abs(a[j] - b[j]) > tol * std::max(1.0, std::abs(a[j]))) return false;
  return true;
}

class VertexEnumerator {
 public:
  VertexEnumerator(const LpProblem& lp, double tol) : lp_(lp), tol_(tol), state_(lp.num_vars()) {}

  std::vector<Vector> run() {
    assign(0);
    return std::move(found_);
  }

 private:
  void assign(std::size_t j) {
    if (j == lp_.num_vars()) {
      solve_for_free();
      return;
    }
    state_[j] = VarState::AtLower;
    assign(j + 1);
    if (lp_.ub[j] > lp_.lb[j]) {
      state_[j] = VarState::AtUpper;
      assign(j + 1);
      state_[j] = VarState::Free;
      assign(j + 1);
    }
  }

  void solve_for_free() {
    free_.clear();
    for (std::size_t j = 0; j < state_.size(); ++j)
      if (state_[j] == VarState::Free) free_.push_back(j);
    if (free_.size() > lp_.num_rows()) return;
    rows_.clear();
    choose_rows(0);
  }

  void choose_rows(std::size_t start) {
    const std::size_t k = free_.size();
    if (rows_.size() == k) {
      evaluate();
      return;
    }
    for (std::size_t i = start; i < lp_.num_rows(); ++i) {
      if (lp_.num_rows() - i < k - rows_.size()) break;
      rows_.push_back(i);
      choose_rows(i + 1);
      rows_.pop_back();
    }
  }

  void evaluate() {
    const std::size_t n = lp_.num_vars();
    const std::size_t k = free_.size();
    Vector x(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (state_[j] == VarState::AtLower) x[j] = lp_.lb[j];
      if (state_[j] == VarState::AtUpper) x[j] = lp_.ub[j];
    }
    if (k > 0) {
      std::vector<double> m(k * k);
      std::vector<double> rhs(k);
      for (std::size_t a = 0; a < k; ++a) {
        const auto row = lp_.constraints.row(rows_[a]);
        double fixed = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          if (state_[j] != VarState::Free) fixed += row[j] * x[j];
        rhs[a] = lp_.rhs[rows_[a]] - fixed;
        for (std::size_t b = 0; b < k; ++b) m[a * k + b] = row[free_[b]];
      }
      if (!solve_square(m, rhs, k)) return;
      for (std::size_t b = 0; b < k; ++b) x[free_[b]] = rhs[b];
    }
    if (!lp_feasible(lp_, x, tol_)) return;
    for (std::size_t j = 0; j < n; ++j) x[j] = std::clamp(x[j], lp_.lb[j], lp_.ub[j]);
    for (const auto& v : found_)
      if (same_point(v, x, 1e-7)) return;
    found_.push_back(std::move(x));
  }

  const LpProblem& lp_;
  double tol_;
  std::vector<VarState> state_;
  std::vector<std::size_t> free_;
  std::vector<std::size_t> rows_;
  std::vector<Vector> found_;
};

}  // namespace

std::vector<Vector> enumerate_vertices(const LpProblem& problem, double tol) {
  if (problem.num_vars() > kMaxEnumerationVars)
    throw DimensionTooLarge("enumerate_vertices: " + std::to_string(problem.num_vars()) +
                            " variables exceeds the limit of " +
                            std::to_string(kMaxEnumerationVars));
  for (std::size_t j = 0; j < problem.num_vars(); ++j)
    if (problem.lb[j] > problem.ub[j]) return {};
  auto vertices = VertexEnumerator(problem, tol).run();
  std::sort(vertices.begin(), vertices.end());
  return vertices;
}

}  // namespace dmilp
