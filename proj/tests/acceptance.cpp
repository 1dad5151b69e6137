// Acceptance suite: one PASS/FAIL/SKIP line per criterion. The fine-grid
// second-level run only executes when STOCHMATCH_PAPER_SCALE=1.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "stochmatch/lp_hierarchy.hpp"
#include "stochmatch/simulator.hpp"
#include "stochmatch/verifier.hpp"

using namespace stochmatch;

namespace {

enum class Verdict { kPass, kFail, kSkip };

struct Result {
  Verdict verdict = Verdict::kFail;
  std::string detail;
};

Result pass_if(bool ok, const std::string& detail) {
  return {ok ? Verdict::kPass : Verdict::kFail, detail};
}

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

constexpr long kTrials = 1000000;

const std::vector<double> kXs = {0.25, 0.5, 0.75, 1.0};

Result closed_form() {
  const double gamma = top_half_gamma();
  const auto jl = jaillet_lu_closed_form();
  const bool ok = gamma > 0.7062 && gamma < 0.7063 && std::abs(jl.ratio - gamma) <= 1e-14 &&
                  std::abs(jl.ratio - 0.706) < 5e-4;
  return pass_if(ok, fmt("gamma=%.16f jl_ratio=%.16f", gamma, jl.ratio));
}

Result first_level() {
  std::vector<double> grid;
  for (int k = 1; k <= 100; ++k) grid.push_back(k / 100.0);
  const auto curve = first_level_curve(1e-5, grid);
  const double at_one = curve.points.back().one_minus_p;
  const bool ok = at_one >= 0.7070 && at_one <= 0.7080 && std::abs(at_one - 0.7075) <= 5e-4 &&
                  curve.min_ratio >= 0.707 - 1e-4;
  return pass_if(ok, fmt("1-p_1(1)=%.6f min_ratio=%.6f at x=%.2f", at_one, curve.min_ratio,
                         curve.argmin_x));
}

GridConfig uniform_grid(double step) {
  GridConfig grid;
  grid.dt = grid.dx = grid.dlambda = step;
  return grid;
}

Result second_level_ci() {
  bool ok = true;
  std::ostringstream detail;
  for (double x : kXs) {
    const double fine = second_level_ratio(x, uniform_grid(1e-3)).ratio;
    const double coarse = second_level_ratio(x, uniform_grid(2e-3)).ratio;
    ok = ok && fine >= 0.70 && fine >= coarse - 1e-3;
    detail << fmt("x=%.2f:%.6f(2e-3:%.6f) ", x, fine, coarse);
  }
  return pass_if(ok, detail.str());
}

Result second_level_fine() {
  const char* flag = std::getenv("STOCHMATCH_PAPER_SCALE");
  if (!flag || std::string(flag) != "1") {
    return {Verdict::kSkip, "set STOCHMATCH_PAPER_SCALE=1 to run the 1e-4 grid"};
  }
  bool ok = true;
  std::ostringstream detail;
  for (double x : kXs) {
    const double ratio = second_level_ratio(x, uniform_grid(1e-4)).ratio;
    ok = ok && ratio >= 0.716;
    detail << fmt("x=%.2f:%.6f ", x, ratio);
  }
  return pass_if(ok, detail.str());
}

Result hardness() {
  const auto result = hardness_bound(1000000, 0.94);
  const bool ok = result.ratio_bound < 0.703 &&
                  std::abs(static_cast<double>(result.k_star) - 2.07e5) <= 2.07e4;
  return pass_if(ok, fmt("bound=%.6f k_star=%ld", result.ratio_bound, result.k_star));
}

Result ode() {
  const auto check = top_half_ode_check(1e-4);
  const double gamma = top_half_gamma();
  const bool ok = check.max_residual <= 1e-5 && std::abs(check.b0 - 1.0) <= 1e-10 &&
                  std::abs(check.b1 - (1.0 - gamma)) <= 1e-10;
  return pass_if(ok, fmt("residual=%.3e B(0)=%.12f B(1)=%.12f", check.max_residual, check.b0,
                         check.b1));
}

Instance random_small(std::mt19937_64& rng, int max_types, int max_offline, WeightClass weights,
                      bool free_disposal) {
  RandomInstanceParams params;
  params.n_types = std::uniform_int_distribution<int>(1, max_types)(rng);
  params.n_offline = std::uniform_int_distribution<int>(1, max_offline)(rng);
  params.edge_prob = 0.6;
  params.weight_class = weights;
  params.free_disposal = free_disposal;
  return gen_random(params, rng());
}

constexpr Algorithm kAlgorithms[] = {Algorithm::kSuggestedMatching, Algorithm::kTopHalfSampling,
                                     Algorithm::kPoissonOcs, Algorithm::kGreedy};

Result oracle_equivalence() {
  std::mt19937_64 rng(7);
  int failures = 0;
  double worst_z = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto weights = k % 2 ? WeightClass::kVertexWeighted : WeightClass::kUnweighted;
    const Instance instance = random_small(rng, 4, 6, weights, false);
    const int total =
        std::clamp(static_cast<int>(std::lround(instance.total_rate())), 1, 5);
    const LpSolution lp = solve_lp(instance, 1);
    for (Algorithm algorithm : kAlgorithms) {
      const double exact = exact_expected_value(instance, lp.matching, algorithm, total);
      const McReport mc = monte_carlo(instance, lp.matching, algorithm, kTrials,
                                      derive_seed(100, k), ArrivalModel::fixed(total));
      const double gap = std::abs(mc.alg_mean - exact);
      if (gap > 4.0 * mc.alg_stderr + 1e-12) ++failures;
      if (mc.alg_stderr > 0.0) worst_z = std::max(worst_z, gap / mc.alg_stderr);
    }
  }
  return pass_if(failures == 0, fmt("80 comparisons, failures=%d worst_z=%.2f", failures, worst_z));
}

Result algorithm_guarantees() {
  std::mt19937_64 rng(8);
  int failures = 0;
  double worst_ocs2 = 1e9, worst_ocs1 = 1e9, worst_top = 1e9;
  for (int k = 0; k < 10; ++k) {
    const auto weights = k % 2 ? WeightClass::kVertexWeighted : WeightClass::kUnweighted;
    const Instance instance = random_small(rng, 5, 4, weights, false);
    for (auto [level, factor, worst] :
         {std::tuple{2, 0.716, &worst_ocs2}, std::tuple{1, 0.707, &worst_ocs1}}) {
      const LpSolution lp = solve_lp(instance, level);
      const McReport mc = monte_carlo(instance, lp.matching, Algorithm::kPoissonOcs, kTrials,
                                      derive_seed(200 + level, k), ArrivalModel::poisson());
      for (int j = 0; j < instance.offline_count; ++j) {
        const auto& p = mc.per_vertex_match_prob[j];
        const double margin = p.value - (factor * lp.matching.load(j) - 3.0 * p.std_error);
        if (margin < 0.0) ++failures;
        if (lp.matching.load(j) > 0.0) *worst = std::min(*worst, margin);
      }
    }
  }
  for (int k = 0; k < 10; ++k) {
    const Instance instance = random_small(rng, 5, 4, WeightClass::kEdgeWeighted, true);
    const LpSolution lp = solve_lp(instance, 1);
    const McReport mc = monte_carlo(instance, lp.matching, Algorithm::kTopHalfSampling, kTrials,
                                    derive_seed(300, k), ArrivalModel::poisson());
    const double margin = mc.alg_mean - (0.7062 * lp.objective - 3.0 * mc.alg_stderr);
    worst_top = std::min(worst_top, margin);
    if (margin < 0.0) ++failures;
  }
  return pass_if(failures == 0,
                 fmt("failures=%d min margins: ocs/level2=%.4f ocs/level1=%.4f top-half=%.4f",
                     failures, worst_ocs2, worst_ocs1, worst_top));
}

Result suggested_thinning() {
  std::mt19937_64 rng(9);
  int failures = 0, checked = 0;
  double worst_z = 0.0;
  for (int k = 0; k < 5; ++k) {
    const Instance instance = random_small(rng, 5, 4, WeightClass::kUnweighted, false);
    const LpSolution lp = solve_lp(instance, 1);
    const McReport mc = monte_carlo(instance, lp.matching, Algorithm::kSuggestedMatching, kTrials,
                                    derive_seed(400, k), ArrivalModel::poisson());
    for (int j = 0; j < instance.offline_count; ++j) {
      const auto& p = mc.per_vertex_match_prob[j];
      const double gap = std::abs(p.value - (1.0 - std::exp(-lp.matching.load(j))));
      ++checked;
      if (gap > 3.0 * p.std_error + 1e-12) ++failures;
      if (p.std_error > 0.0) worst_z = std::max(worst_z, gap / p.std_error);
    }
  }
  return pass_if(failures == 0,
                 fmt("%d vertices, failures=%d worst_z=%.2f", checked, failures, worst_z));
}

Result lp_machinery() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int oracle_mismatches = 0;
  for (int k = 0; k < 500; ++k) {
    const Instance instance = random_small(rng, 12, 4, WeightClass::kUnweighted, false);
    FractionalMatching x(instance.type_count(), instance.offline_count);
    const double scale = 0.3 + unit(rng);
    for (int i = 0; i < instance.type_count(); ++i) {
      for (const auto& edge : instance.types[i].edges) {
        x(i, edge.offline) =
            scale * unit(rng) * instance.types[i].rate / instance.types[i].edges.size();
      }
    }
    const int level = std::uniform_int_distribution<int>(1, instance.offline_count)(rng);
    const bool brute = testing::brute_force_violation(instance, x, level) > kOracleTolerance;
    if (separation_oracle(instance, x, level).has_value() != brute) ++oracle_mismatches;
  }

  int nesting_failures = 0, jensen_failures = 0;
  for (int k = 0; k < 50; ++k) {
    const Instance instance = random_small(rng, 6, 4, WeightClass::kVertexWeighted, false);
    double previous = solve_lp(instance, 0).objective;
    for (int level = 1; level <= instance.offline_count; ++level) {
      const LpSolution lp = solve_lp(instance, level);
      if (lp.objective > previous + 1e-7 || lp.status != LpStatus::kOptimal) ++nesting_failures;
      if (!check_converse_jensen_c3(instance, lp.matching, 1e-7).pass) ++jensen_failures;
      previous = lp.objective;
    }
  }

  const Instance jl_instance = gen_jaillet_lu();
  const LpSolution jl = solve_jaillet_lu_lp(jl_instance);
  const double ln2 = std::numbers::ln2;
  const bool jl_ok = std::abs(jl.objective - 2.0) <= 1e-7 &&
                     std::abs(jl.matching(0, 0) - (1.0 - ln2)) <= 1e-7 &&
                     std::abs(jl.matching(2, 1) - (1.0 - ln2)) <= 1e-7 &&
                     std::abs(jl.matching(1, 0) - ln2) <= 1e-7 &&
                     std::abs(jl.matching(1, 1) - ln2) <= 1e-7;
  return pass_if(oracle_mismatches == 0 && nesting_failures == 0 && jensen_failures == 0 &&
                     jl_ok,
                 fmt("oracle_mismatches=%d nesting_failures=%d jensen_failures=%d "
                     "jl_objective=%.9f",
                     oracle_mismatches, nesting_failures, jensen_failures, jl.objective));
}

Result property_suite_run() {
  const VerifierReport report = property_suite(42, 1000);
  std::ostringstream detail;
  for (const auto& [name, value] : report.values) {
    if (name.ends_with("_failures")) detail << name << '=' << value << ' ';
  }
  return pass_if(report.pass, detail.str());
}

Result jl_simulation() {
  const Instance instance = gen_jaillet_lu();
  const LpSolution lp = solve_jaillet_lu_lp(instance);
  const McReport mc = monte_carlo(instance, lp.matching, Algorithm::kGreedy, kTrials, 42,
                                  ArrivalModel::poisson());
  const double ratio = mc.alg_mean / 2.0;
  const double ratio_stderr = mc.alg_stderr / 2.0;
  const bool ok = std::abs(mc.alg_mean - 1.41253) <= 3.0 * mc.alg_stderr &&
                  std::abs(ratio - 0.70627) <= 3.0 * ratio_stderr;
  return pass_if(ok, fmt("alg=%.6f stderr=%.6f ratio=%.6f", mc.alg_mean, mc.alg_stderr, ratio));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"AC1 closed-form constants", closed_form},
      {"AC2 first-level curve", first_level},
      {"AC3 second-level ratio at 1e-3", second_level_ci},
      {"AC4 second-level ratio at 1e-4", second_level_fine},
      {"AC5 hardness bound", hardness},
      {"AC6 ODE residual", ode},
      {"AC7 exact DP vs Monte Carlo", oracle_equivalence},
      {"AC8 algorithm guarantees", algorithm_guarantees},
      {"AC9 suggested matching thinning", suggested_thinning},
      {"AC10 LP machinery", lp_machinery},
      {"AC11 property suite", property_suite_run},
      {"AC12 JL greedy simulation", jl_simulation},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Result outcome;
    try {
      outcome = check();
    } catch (const std::exception& error) {
      outcome = {Verdict::kFail, std::string("exception: ") + error.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* label = outcome.verdict == Verdict::kPass   ? "PASS"
                        : outcome.verdict == Verdict::kSkip ? "SKIP"
                                                            : "FAIL";
    failed += outcome.verdict == Verdict::kFail;
    std::printf("%s %s: %s (%.1fs)\n", label, name, outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
