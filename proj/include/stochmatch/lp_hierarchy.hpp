#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stochmatch/instance.hpp"

namespace stochmatch {

/// Poisson constraint  sum_{i in S, j in T} x_ij <= sum_{k=1}^{|T|} (1 - P_{k-1}(lambda_S)).
struct Cut {
  std::vector<int> types;    // S
  std::vector<int> offline;  // T
  double rhs = 0.0;
  double lhs = 0.0;
  double violation = 0.0;  // lhs - rhs
};

enum class LpStatus { kOptimal, kIterationLimit };

struct LpSolution {
  FractionalMatching matching;
  double objective = 0.0;
  int cuts_added = 0;
  LpStatus status = LpStatus::kOptimal;
};

std::string to_string(LpStatus status);

/// {"objective", "x": [{"i", "j", "v"}] (nonzero entries), "cuts_added", "status"}.
std::string lp_solution_to_json(const Instance& instance, const LpSolution& solution);

inline constexpr double kOracleTolerance = 1e-9;

/// Most violated level-<=`level` Poisson constraint, or nullopt.
///
/// For each T with |T| = m <= level, online types are sorted by
/// (1/lambda_i) sum_{j in T} x_ij in descending order and only prefix sets S
/// are checked; the largest violation over prefixes equals the largest
/// violation over all S. Ties go to the earlier T in (size, lexicographic)
/// order, then to the shorter prefix. Throws std::invalid_argument for
/// level < 1.
std::optional<Cut> separation_oracle(const Instance& instance,
                                     const FractionalMatching& x, int level,
                                     double tol = kOracleTolerance);

/// The most violated cut for every T that has one, in (size, lex) order.
std::vector<Cut> violated_cuts_per_subset(const Instance& instance,
                                          const FractionalMatching& x,
                                          int level,
                                          double tol = kOracleTolerance);

/// Solves the level-`level` Poisson Matching LP. Level 0 is the matching
/// polytope; higher levels run a cutting-plane loop seeded with the cuts
/// (S = I, T = {j}). The iteration cap is 50 |I| |J| cuts.
LpSolution solve_lp(const Instance& instance, int level,
                    double tol = kOracleTolerance);

/// JL LP: matching polytope plus sum_i (2 x_ij - lambda_i)^+ <= 1 - ln 2
/// per offline vertex, linearized with auxiliary variables.
LpSolution solve_jaillet_lu_lp(const Instance& instance,
                               double tol = kOracleTolerance);

struct ConverseJensenReport {
  std::vector<double> excess;  // per offline vertex: sum_i (x_ij - lambda_i/2)^+
  double bound = 0.0;          // (1 - ln 2) / 2
  bool pass = true;
};

ConverseJensenReport check_converse_jensen_c3(const Instance& instance,
                                              const FractionalMatching& x,
                                              double tol = 1e-7);

// ---------------------------------------------------------------------------
// Second level converse Jensen machinery.

/// Truncation for every lambda* bisection and lambda-integral.
inline constexpr double kLambdaCap = 40.0;

struct LambdaStar {
  double first = 0.0;
  double second = 0.0;
};

/// (2 - P_0(l2) - P_1(l2)) - (1 - P_0(min{l1, l2})); nondecreasing in l2.
double pair_mass(double lambda1, double lambda2);

/// lambda1* = -ln(1 - x1) (capped) and lambda2* solving pair_mass = x2 by
/// bisection to 1e-12. Requires 0 <= x2 <= x1 < 1 up to the cap.
LambdaStar lambda_star_solve(double x1, double x2);

/// Same equations without the x2 <= x1 ordering; x2 may range up to the
/// supremum 2 - x1 of pair_mass.
LambdaStar lambda_star_solve_unordered(double x1, double x2);

/// f(y, z) = (A y + B (z - y)) / ((A-1)^+ y + (B-1)^+ (z - y) + 1), A >= B > 0.
/// Normalized and DR-submodular on [0,1]^2.
struct DrFamily {
  double a = 1.0;
  double b = 1.0;

  double operator()(double y, double z) const { return eval_split(y, z - y); }
  /// f at (y, y + w).
  double eval_split(double y, double w) const;
};

/// Quadrature node on the case-split lambda-profile: the integrand is
/// f(y, y + w) and `weight` is the composite Simpson weight.
struct ProfileNode {
  double y = 0.0;
  double w = 0.0;
  double weight = 0.0;
};

/// Nodes for  int_0^{min} f(P0, P1) + int_{min}^{max} f(0, P1) or f(P0, P0)
/// (the branch is chosen by whether lambda1* <= lambda2*), with composite
/// Simpson steps no larger than dlambda.
std::vector<ProfileNode> second_level_profile(const LambdaStar& lambda_star,
                                              double dlambda);

double integrate_profile(const std::vector<ProfileNode>& nodes, const DrFamily& f);

struct SecondLevelCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
};

/// lhs = sum_i lambda_i f(rho_i,j1, rho_i,j1 + rho_i,j2) against the integral
/// bound evaluated with step dlambda; pass iff lhs >= rhs - 1e-6.
SecondLevelCheck check_second_level_cj(const Instance& instance,
                                       const FractionalMatching& x, int j1,
                                       int j2, const DrFamily& f,
                                       double dlambda = 1e-4);

}  // namespace stochmatch
