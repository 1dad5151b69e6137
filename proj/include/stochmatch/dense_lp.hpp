#pragma once

#include <span>
#include <vector>

namespace stochmatch {

/// Dense primal simplex for  max c.x  s.t.  A x <= b, x >= 0  with b >= 0.
///
/// Nonnegative right-hand sides make the slack basis feasible, so no phase
/// one is needed. Pricing is Dantzig's rule, falling back to Bland's rule
/// after a run of degenerate pivots.
class DenseLp {
 public:
  enum class Status { kOptimal, kUnbounded, kIterationLimit };

  struct Result {
    Status status = Status::kOptimal;
    std::vector<double> x;
    double objective = 0.0;
    int pivots = 0;
  };

  explicit DenseLp(int num_vars);

  int num_vars() const { return num_vars_; }
  int num_rows() const { return static_cast<int>(rhs_.size()); }

  void set_objective(std::span<const double> c);
  /// Adds a_row . x <= rhs; rhs must be nonnegative.
  void add_row(std::span<const double> a_row, double rhs);

  Result solve(int max_pivots = 200000) const;

 private:
  int num_vars_;
  std::vector<double> objective_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> rhs_;
};

}  // namespace stochmatch
