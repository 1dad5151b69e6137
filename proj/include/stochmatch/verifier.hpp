#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace stochmatch {

/// Discretization for the recurrence verifiers. 1/dt and 1/dx must be
/// integers and dlambda <= dt.
struct GridConfig {
  double dt = 1e-3;
  double dx = 1e-3;
  double dlambda = 1e-3;
  double lambda_cap = 40.0;

  /// Throws std::invalid_argument naming the broken invariant.
  void validate() const;
  int t_steps() const;
  int x_steps() const;
};

using NamedValues = std::vector<std::pair<std::string, double>>;

struct VerifierReport {
  std::string name;
  NamedValues values;
  NamedValues params;
  std::string target;
  bool pass = false;
  std::vector<std::string> notes;
  std::vector<std::pair<double, double>> curve;  // (x, ratio), may be empty
};

std::string report_to_json(const VerifierReport& report);
std::string curve_to_csv(const VerifierReport& report);

// Top Half Sampling constant and its ODE.
double top_half_gamma();
/// B(t) = ((2e)^{-t} - ln2 e^{-2t}) / (1 - ln2), the extremal solution with Opt = 1.
double top_half_b(double t);

struct OdeCheck {
  double max_residual = 0.0;
  double b0 = 0.0;
  double b1 = 0.0;
  double slope0 = 0.0;  // second-order one-sided difference at t = 0
};

/// Central-difference residual of (2 + 2ln2) B + (3 + ln2) B' + B'' on the t-grid.
OdeCheck top_half_ode_check(double dt);

// First-level recurrence: dp/dt = p log(1 - x + x e^{-2xt}/p) / (1 - e^{-2xt}/p).
struct FirstLevelPoint {
  double x = 0.0;
  double one_minus_p = 0.0;
  double ratio = 0.0;
};

struct FirstLevelCurve {
  std::vector<FirstLevelPoint> points;
  double min_ratio = 0.0;
  double argmin_x = 0.0;
};

/// p_x(1) by classical RK4. Throws std::runtime_error if the trajectory leaves
/// [e^{-2xt} - 1e-9, e^{-xt} + 1e-9].
double first_level_p(double x, double dt);
FirstLevelCurve first_level_curve(double dt, const std::vector<double>& x_grid);

// Second-level discretized recurrences.

/// The d-hat trajectory for x1 >= x2 on the t-grid (1/dt + 1 values).
std::vector<double> d_hat_trajectory(double x1, double x2, const GridConfig& grid);

struct SecondLevelResult {
  double ratio = 0.0;  // (1 - s_hat(1)) / x
  double s_hat_end = 0.0;
  double min_s_gap = 0.0;  // min over t of s_hat - e^{-tx} q_hat
};

/// Throws std::invalid_argument for x outside (0, 1] or an invalid grid, and
/// std::runtime_error when an internal bound fails.
SecondLevelResult second_level_ratio(double x, const GridConfig& grid);

// Edge-weighted hardness recursion.
struct HardnessResult {
  double ratio_bound = 0.0;
  long k_star = 0;
  double f_end = 0.0;  // F(n)
};

/// F(s + 1) = F(s) + 1 - (m/n) C(F,2)/C(n,2) - (m/n) C(F,3)/C(n,3), F(0) = 0.
std::vector<double> hardness_sequence(long n, double m_frac);
/// Max over cutoffs k in [0, n] of (F(n-k) + x (n - sum_{s<n-k} F(s) / n) + 1) / ((1+x) n).
HardnessResult hardness_bound(long n, double x, double m_frac = 0.405);

struct JailletLuClosedForm {
  double alg = 0.0;
  double ratio = 0.0;
  double pr_t_unmatched = 0.0;
  double single_middle_term = 0.0;
};

JailletLuClosedForm jaillet_lu_closed_form();

/// Randomized inequality checks; see README for the six families.
VerifierReport property_suite(std::uint64_t seed, int trials);

// Report builders used by the CLI.
VerifierReport top_half_report();
VerifierReport ode_report(double dt);
VerifierReport first_level_report(double dt, double dx);
VerifierReport second_level_report(const std::vector<double>& xs, const GridConfig& grid,
                                   double target);
VerifierReport hardness_report(long n, double x, double m_frac);
VerifierReport jaillet_lu_report();

}  // namespace stochmatch
