#include "stochmatch/dense_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stochmatch {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kOptimalityTol = 1e-11;
constexpr int kDegenerateRunBeforeBland = 50;

}  // namespace

DenseLp::DenseLp(int num_vars) : num_vars_(num_vars), objective_(num_vars, 0.0) {
  if (num_vars < 0) throw std::invalid_argument("DenseLp: negative variable count");
}

void DenseLp::set_objective(std::span<const double> c) {
  if (static_cast<int>(c.size()) != num_vars_) {
    throw std::invalid_argument("DenseLp: objective size mismatch");
  }
  objective_.assign(c.begin(), c.end());
}

void DenseLp::add_row(std::span<const double> a_row, double rhs) {
  if (static_cast<int>(a_row.size()) != num_vars_) {
    throw std::invalid_argument("DenseLp: row size mismatch");
  }
  if (rhs < 0.0) throw std::invalid_argument("DenseLp: right-hand side must be >= 0");
  rows_.emplace_back(a_row.begin(), a_row.end());
  rhs_.push_back(rhs);
}

DenseLp::Result DenseLp::solve(int max_pivots) const {
  const int m = num_rows();
  const int n = num_vars_;
  const int cols = n + m;

  std::vector<std::vector<double>> tableau(m, std::vector<double>(cols, 0.0));
  std::vector<double> b = rhs_;
  std::vector<int> basis(m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) tableau[r][c] = rows_[r][c];
    tableau[r][n + r] = 1.0;
    basis[r] = n + r;
  }
  std::vector<double> reduced(cols, 0.0);
  for (int c = 0; c < n; ++c) reduced[c] = objective_[c];

  Result result;
  int degenerate_run = 0;
  while (true) {
    const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
    int entering = -1;
    double best = kOptimalityTol;
    for (int c = 0; c < cols; ++c) {
      if (reduced[c] > best) {
        entering = c;
        if (bland) break;
        best = reduced[c];
      }
    }
    if (entering < 0) {
      result.status = Status::kOptimal;
      break;
    }
    if (result.pivots >= max_pivots) {
      result.status = Status::kIterationLimit;
      break;
    }

    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < m; ++r) {
      const double a = tableau[r][entering];
      if (a <= kPivotTol) continue;
      const double ratio = b[r] / a;
      if (leaving < 0 || ratio < best_ratio - 1e-12) {
        best_ratio = ratio;
        leaving = r;
      } else if (ratio <= best_ratio + 1e-12 && basis[r] < basis[leaving]) {
        best_ratio = std::min(best_ratio, ratio);
        leaving = r;
      }
    }
    if (leaving < 0) {
      result.status = Status::kUnbounded;
      break;
    }
    degenerate_run = (b[leaving] <= 1e-12) ? degenerate_run + 1 : 0;

    auto& pivot_row = tableau[leaving];
    const double pivot = pivot_row[entering];
    for (double& v : pivot_row) v /= pivot;
    b[leaving] /= pivot;
    for (int r = 0; r < m; ++r) {
      if (r == leaving) continue;
      const double factor = tableau[r][entering];
      if (factor == 0.0) continue;
      auto& row = tableau[r];
      for (int c = 0; c < cols; ++c) row[c] -= factor * pivot_row[c];
      b[r] -= factor * b[leaving];
      if (b[r] < 0.0 && b[r] > -1e-12) b[r] = 0.0;
    }
    const double factor = reduced[entering];
    for (int c = 0; c < cols; ++c) reduced[c] -= factor * pivot_row[c];
    basis[leaving] = entering;
    ++result.pivots;
  }

  result.x.assign(n, 0.0);
  for (int r = 0; r < m; ++r) {
    if (basis[r] < n) result.x[basis[r]] = std::max(0.0, b[r]);
  }
  for (int c = 0; c < n; ++c) result.objective += objective_[c] * result.x[c];
  return result;
}

}  // namespace stochmatch
