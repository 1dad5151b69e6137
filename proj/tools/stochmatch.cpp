#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stochmatch/instance.hpp"
#include "stochmatch/lp_hierarchy.hpp"
#include "stochmatch/online.hpp"
#include "stochmatch/simulator.hpp"
#include "stochmatch/verifier.hpp"

using namespace stochmatch;

namespace {

constexpr int kExitFailedTarget = 1;
constexpr int kExitBadInput = 2;

struct Options {
  std::string out;
  std::string format = "json";

  // gen
  std::string kind = "random";
  int types = 3;
  int offline = 2;
  double edge_prob = 1.0;
  std::string weight_class = "unweighted";
  bool free_disposal = false;
  int n_small = 4;
  double eps = 0.01;

  // lp / simulate
  std::string instance_path;
  int level = 1;
  bool jl = false;
  std::string algo = "ocs";
  long trials = 10000;
  std::string model = "poisson";
  int total_arrivals = 0;

  // verify
  std::string which;
  std::uint64_t seed = 42;
  double dt = 0.0;
  double dx = 0.0;
  double dlambda = 0.0;
  long n = 1000000;
  double x = 0.94;
  double m_frac = 0.405;
  std::vector<double> xs = {0.25, 0.5, 0.75, 1.0};
  double target = 0.70;
  int property_trials = 1000;
};

void emit(const Options& options, const std::string& text) {
  if (options.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream file(options.out);
  if (!file) throw std::invalid_argument("cannot write " + options.out);
  file << text;
  if (!text.empty() && text.back() != '\n') file << '\n';
}

LpSolution fractional_solution(const Instance& instance, const Options& options) {
  return options.jl ? solve_jaillet_lu_lp(instance) : solve_lp(instance, options.level);
}

int run_gen(const Options& options) {
  Instance instance;
  if (options.kind == "random") {
    RandomInstanceParams params;
    params.n_types = options.types;
    params.n_offline = options.offline;
    params.edge_prob = options.edge_prob;
    params.weight_class = weight_class_from_string(options.weight_class);
    params.free_disposal = options.free_disposal;
    instance = gen_random(params, options.seed);
  } else if (options.kind == "hardness-ew") {
    instance = gen_hardness_edge_weighted(options.n_small, options.x, options.eps);
  } else if (options.kind == "jaillet-lu") {
    instance = gen_jaillet_lu();
  } else {
    throw std::invalid_argument("unknown generator: " + options.kind);
  }
  emit(options, instance_to_json(instance));
  return 0;
}

int run_lp(const Options& options) {
  const Instance instance = load_instance(options.instance_path);
  const LpSolution solution = fractional_solution(instance, options);
  emit(options, lp_solution_to_json(instance, solution));
  return solution.status == LpStatus::kOptimal ? 0 : kExitFailedTarget;
}

ArrivalModel arrival_model(const Options& options) {
  if (options.model == "poisson") return ArrivalModel::poisson();
  if (options.model == "fixed") {
    if (options.total_arrivals < 1) throw std::invalid_argument("--lambda must be >= 1");
    return ArrivalModel::fixed(options.total_arrivals);
  }
  throw std::invalid_argument("unknown arrival model: " + options.model);
}

int run_simulate(const Options& options) {
  const Instance instance = load_instance(options.instance_path);
  const Algorithm algorithm = algorithm_from_string(options.algo);
  const ArrivalModel model = arrival_model(options);
  const LpSolution solution = fractional_solution(instance, options);
  std::vector<TrialRecord> records;
  const McReport report = monte_carlo(instance, solution.matching, algorithm, options.trials,
                                      options.seed, model,
                                      options.format == "csv" ? &records : nullptr);
  emit(options, options.format == "csv" ? trials_to_csv(records) : mc_report_to_json(report));
  return 0;
}

GridConfig grid_for(const Options& options, double default_step) {
  GridConfig grid;
  grid.dt = options.dt > 0.0 ? options.dt : default_step;
  grid.dx = options.dx > 0.0 ? options.dx : default_step;
  grid.dlambda = options.dlambda > 0.0 ? options.dlambda : std::min(1e-3, grid.dt);
  grid.validate();
  return grid;
}

VerifierReport jl_simulation_report(const Options& options) {
  const Instance instance = gen_jaillet_lu();
  const LpSolution solution = solve_jaillet_lu_lp(instance);
  const McReport mc = monte_carlo(instance, solution.matching, Algorithm::kGreedy,
                                  options.trials, options.seed, ArrivalModel::poisson());
  const double expected = 2.0 * top_half_gamma();
  VerifierReport report;
  report.name = "jl-simulation";
  report.values = {{"alg_mean", mc.alg_mean},
                   {"alg_stderr", mc.alg_stderr},
                   {"ratio_vs_jl", mc.alg_mean / 2.0},
                   {"expected_alg", expected}};
  report.params = {{"trials", static_cast<double>(options.trials)},
                   {"seed", static_cast<double>(options.seed)}};
  report.target = "greedy alg_mean within 3 stderr of 2 * gamma";
  report.pass = std::abs(mc.alg_mean - expected) <= 3.0 * mc.alg_stderr;
  return report;
}

VerifierReport verify_one(const std::string& which, const Options& options) {
  if (which == "top-half") return top_half_report();
  if (which == "ode") return ode_report(options.dt > 0.0 ? options.dt : 1e-4);
  if (which == "first-level") {
    return first_level_report(options.dt > 0.0 ? options.dt : 1e-5,
                              options.dx > 0.0 ? options.dx : 0.01);
  }
  if (which == "second-level") {
    return second_level_report(options.xs, grid_for(options, 1e-3), options.target);
  }
  if (which == "hardness") return hardness_report(options.n, options.x, options.m_frac);
  if (which == "jl") return jaillet_lu_report();
  if (which == "properties") return property_suite(options.seed, options.property_trials);
  if (which == "jl-simulation") return jl_simulation_report(options);
  throw std::invalid_argument("unknown verifier: " + which);
}

int finish(const Options& options, const std::vector<VerifierReport>& reports) {
  bool pass = true;
  std::string text;
  if (options.format == "csv") {
    for (const auto& report : reports) text += curve_to_csv(report);
  } else if (reports.size() == 1) {
    text = report_to_json(reports.front());
  } else {
    text = "[\n";
    for (std::size_t k = 0; k < reports.size(); ++k) {
      text += report_to_json(reports[k]) + (k + 1 < reports.size() ? ",\n" : "\n");
    }
    text += "]";
  }
  emit(options, text);
  for (const auto& report : reports) {
    if (!report.pass) {
      std::cerr << "failed: " << report.name << " (" << report.target << ")\n";
      pass = false;
    }
  }
  return pass ? 0 : kExitFailedTarget;
}

int run_verify(const Options& options) {
  return finish(options, {verify_one(options.which, options)});
}

int run_all(Options options) {
  std::vector<VerifierReport> reports;
  for (const char* which : {"top-half", "ode", "first-level", "second-level", "hardness", "jl",
                            "properties", "jl-simulation"}) {
    Options step = options;
    // The first-level and ODE checks use their own finer defaults.
    if (std::string(which) == "first-level" || std::string(which) == "ode") {
      step.dt = step.dx = 0.0;
    }
    reports.push_back(verify_one(which, step));
    std::cerr << which << ": " << (reports.back().pass ? "pass" : "FAIL") << '\n';
  }
  return finish(options, reports);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online stochastic matching: LPs, simulation, and numeric verification"};
  app.require_subcommand(1);
  app.fallthrough();
  Options options;
  app.add_option("--out,-o", options.out, "Output file (default stdout)");
  app.add_option("--format", options.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", options.seed, "Random seed");

  auto* gen = app.add_subcommand("gen", "Write an instance as JSON");
  gen->add_option("--kind", options.kind, "random | hardness-ew | jaillet-lu")
      ->check(CLI::IsMember({"random", "hardness-ew", "jaillet-lu"}));
  gen->add_option("--types", options.types, "Online types (random)");
  gen->add_option("--offline", options.offline, "Offline vertices (random)");
  gen->add_option("--edge-prob", options.edge_prob, "Edge probability (random)");
  gen->add_option("--weight-class", options.weight_class, "unweighted | vertex | edge")
      ->check(CLI::IsMember({"unweighted", "vertex", "edge"}));
  gen->add_flag("--free-disposal", options.free_disposal, "Enable free disposal (random)");
  gen->add_option("--n", options.n_small, "Offline vertices (hardness-ew)");
  gen->add_option("--x", options.x, "Singleton weight scale (hardness-ew)");
  gen->add_option("--eps", options.eps, "Singleton rate (hardness-ew)");

  auto* lp = app.add_subcommand("lp", "Solve an LP relaxation");
  lp->add_option("--instance", options.instance_path, "Instance JSON")->required();
  auto* level_lp = lp->add_option("--level", options.level, "Hierarchy level");
  lp->add_flag("--jl", options.jl, "Solve the JL LP")->excludes(level_lp);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo competitive ratio");
  simulate->add_option("--instance", options.instance_path, "Instance JSON")->required();
  simulate->add_option("--algo", options.algo, "suggested | top-half | ocs | greedy")
      ->check(CLI::IsMember({"suggested", "top-half", "ocs", "greedy"}));
  simulate->add_option("--trials", options.trials, "Trials")->check(CLI::Range(2L, 1L << 40));
  simulate->add_option("--model", options.model, "poisson | fixed")
      ->check(CLI::IsMember({"poisson", "fixed"}));
  simulate->add_option("--lambda", options.total_arrivals, "Arrivals in the fixed model");
  auto* level_sim = simulate->add_option("--level", options.level, "LP level for x");
  simulate->add_flag("--jl", options.jl, "Use the JL LP for x")->excludes(level_sim);

  auto* verify = app.add_subcommand("verify", "Run one verifier");
  verify->add_option("--which", options.which,
                     "top-half | ode | first-level | second-level | hardness | jl | "
                     "properties | jl-simulation")
      ->required()
      ->check(CLI::IsMember({"top-half", "ode", "first-level", "second-level", "hardness", "jl",
                             "properties", "jl-simulation"}));
  for (auto* command : {verify, app.add_subcommand("all", "Run every verifier")}) {
    command->add_option("--dt", options.dt, "Time step");
    command->add_option("--dx", options.dx, "x step");
    command->add_option("--dlambda", options.dlambda, "Quadrature step");
    command->add_option("--n", options.n, "Hardness size");
    command->add_option("--x", options.x, "Hardness weight scale");
    command->add_option("--m-frac", options.m_frac, "Hardness m / n");
    command->add_option("--xs", options.xs, "Second-level x values")->delimiter(',');
    command->add_option("--target", options.target, "Second-level ratio target");
    command->add_option("--property-trials", options.property_trials, "Samples per family");
    command->add_option("--trials", options.trials, "Simulation trials");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : kExitBadInput;
  }

  try {
    if (*gen) return run_gen(options);
    if (*lp) return run_lp(options);
    if (*simulate) return run_simulate(options);
    if (*verify) return run_verify(options);
    return run_all(options);
  } catch (const std::invalid_argument& error) {
    std::cerr << "error: " << error.what() << '\n';
    return kExitBadInput;
  } catch (const std::runtime_error& error) {
    std::cerr << "error: " << error.what() << '\n';
    const std::string message = error.what();
    return message.rfind("instance not found", 0) == 0 ? kExitBadInput : kExitFailedTarget;
  }
}
