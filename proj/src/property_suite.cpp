#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "stochmatch/instance.hpp"
#include "stochmatch/lp_hierarchy.hpp"
#include "stochmatch/parallel.hpp"
#include "stochmatch/poisson.hpp"
#include "stochmatch/simulator.hpp"
#include "stochmatch/verifier.hpp"

namespace stochmatch {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Random split of `total` into `parts` nonnegative pieces.
std::vector<double> random_partition(Rng& rng, double total, int parts) {
  std::vector<double> cuts{0.0, 1.0};
  for (int k = 1; k < parts; ++k) cuts.push_back(uniform(rng, 0.0, 1.0));
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> pieces;
  for (int k = 0; k < parts; ++k) pieces.push_back(total * (cuts[k + 1] - cuts[k]));
  return pieces;
}

double amplified(double rho) { return std::min(2.0 * rho, 1.0); }

// Draws (A, B) with A >= B > 0 from the requested regime:
// 0: A >= B >= 1, 1: A >= 1 > B, 2: 1 > A >= B.
DrFamily random_family(Rng& rng, int regime) {
  DrFamily f;
  switch (regime) {
    case 0:
      f.b = uniform(rng, 1.0, 6.0);
      f.a = f.b + uniform(rng, 0.0, 6.0);
      break;
    case 1:
      f.b = uniform(rng, 0.01, 1.0);
      f.a = uniform(rng, 1.0, 8.0);
      break;
    default:
      f.a = uniform(rng, 0.02, 1.0);
      f.b = uniform(rng, 0.01, f.a);
      break;
  }
  return f;
}

struct Family {
  explicit Family(std::string family_name) : name(std::move(family_name)) {}

  std::string name;
  int failures = 0;
  double worst = -std::numeric_limits<double>::infinity();  // largest violation seen
  std::vector<std::string> samples;

  void record(double violation, const std::string& inputs) {
    worst = std::max(worst, violation);
    if (violation > 0.0) {
      ++failures;
      if (samples.size() < 5) samples.push_back(name + ": " + inputs);
    }
  }
};

std::string describe(std::initializer_list<std::pair<const char*, double>> items) {
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (const auto& [key, value] : items) {
    out << (first ? "" : " ") << key << '=' << value;
    first = false;
  }
  return out.str();
}

void amplification_family(Rng& rng, int trials, Family& family) {
  for (int k = 0; k < trials; ++k) {
    const double rho = uniform(rng, 0.0, 1.0);
    const auto parts = random_partition(rng, rho, uniform_int(rng, 1, 5));
    double rhs = 0.0;
    for (double part : parts) {
      rhs += amplified(rho) - amplified(rho - part) - std::max(0.0, 2.0 * part - 1.0);
    }
    rhs *= 0.5;
    const double lhs = amplified(rho) - rho;
    family.record(rhs - lhs - 1e-12, describe({{"rho", rho}, {"parts", double(parts.size())}}));
  }
}

void cdf_derivative_family(Rng& rng, int trials, Family& family) {
  constexpr double h = 1e-5;
  for (int k = 0; k < trials; ++k) {
    const int order = uniform_int(rng, 1, 10);
    const double lambda = uniform(rng, 2.0 * h, 30.0);
    const double numeric =
        (poisson_cdf(order, lambda + h) - poisson_cdf(order, lambda - h)) / (2.0 * h);
    const double exact = poisson_cdf(order - 1, lambda) - poisson_cdf(order, lambda);
    family.record(std::abs(numeric - exact) - 1e-6,
                  describe({{"k", double(order)}, {"lambda", lambda}}));
  }
}

void ordered_jensen_family(Rng& rng, int trials, Family& family) {
  for (int k = 0; k < trials; ++k) {
    const DrFamily f = random_family(rng, k % 3);
    const int steps = uniform_int(rng, 1, 12);
    const auto widths = random_partition(rng, 1.0, steps);
    std::vector<double> ys, zs;
    for (int s = 0; s < steps; ++s) {
      ys.push_back(uniform(rng, 0.0, 1.0));
    }
    std::sort(ys.begin(), ys.end());
    double z_prev = 0.0;
    for (int s = 0; s < steps; ++s) {
      const double z = std::min(1.0, std::max(z_prev, ys[s] + uniform(rng, 0.0, 1.0 - ys[s])));
      zs.push_back(z);
      z_prev = z;
    }
    double integral = 0.0, mean_y = 0.0, mean_z = 0.0;
    for (int s = 0; s < steps; ++s) {
      integral += widths[s] * f(ys[s], zs[s]);
      mean_y += widths[s] * ys[s];
      mean_z += widths[s] * zs[s];
    }
    family.record(integral - f(mean_y, mean_z) - 1e-9,
                  describe({{"A", f.a}, {"B", f.b}, {"steps", double(steps)}}));
  }
}

void dr_hessian_family(Rng& rng, int trials, Family& family) {
  constexpr double h = 1e-4;
  for (int k = 0; k < trials; ++k) {
    const DrFamily f = random_family(rng, k % 3);
    const double y = uniform(rng, 2.0 * h, 1.0 - 4.0 * h);
    const double z = uniform(rng, y + 2.0 * h, 1.0 - 2.0 * h);
    const double fyy = (f(y + h, z) - 2.0 * f(y, z) + f(y - h, z)) / (h * h);
    const double fzz = (f(y, z + h) - 2.0 * f(y, z) + f(y, z - h)) / (h * h);
    const double fyz =
        (f(y + h, z + h) - f(y + h, z - h) - f(y - h, z + h) + f(y - h, z - h)) / (4.0 * h * h);
    const double normalized = std::abs(f(0.0, 0.0));
    const double worst = std::max({fyy, fzz, fyz});
    family.record(std::max(worst - 1e-6, normalized - 1e-15),
                  describe({{"A", f.a}, {"B", f.b}, {"y", y}, {"z", z}}));
  }
}

void pair_decay_family(Rng& rng, int trials, Family& family) {
  GridConfig grid;
  grid.dt = grid.dx = grid.dlambda = 1e-3;
  std::vector<std::pair<double, double>> pairs;
  for (int k = 0; k < trials; ++k) {
    const double x1 = uniform(rng, 0.0, 0.999);
    pairs.emplace_back(x1, uniform(rng, 0.0, x1));
  }
  std::vector<double> worst(trials);
  parallel_for(trials, [&](int k) {
    const auto d = d_hat_trajectory(pairs[k].first, pairs[k].second, grid);
    double excess = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < d.size(); ++s) {
      const double t = s * grid.dt;
      excess = std::max(excess, d[s] - std::exp(-t * (pairs[k].first + pairs[k].second)));
    }
    worst[k] = excess;
  });
  for (int k = 0; k < trials; ++k) {
    family.record(worst[k] - 1e-6, describe({{"x1", pairs[k].first}, {"x2", pairs[k].second}}));
  }
}

void second_level_cj_family(Rng& rng, int trials, Family& family) {
  std::vector<std::uint64_t> seeds;
  std::vector<DrFamily> fs;
  std::vector<std::pair<int, int>> js;
  for (int k = 0; k < trials; ++k) {
    seeds.push_back(rng());
    fs.push_back(random_family(rng, k % 3));
    const int j1 = uniform_int(rng, 0, 3);
    int j2 = uniform_int(rng, 0, 2);
    if (j2 >= j1) ++j2;
    js.emplace_back(j1, j2);
  }
  std::vector<double> violation(trials);
  std::vector<std::string> inputs(trials);
  parallel_for(trials, [&](int k) {
    RandomInstanceParams params;
    params.n_types = 5;
    params.n_offline = 4;
    params.edge_prob = 0.6;
    params.weight_class = WeightClass::kEdgeWeighted;
    const Instance instance = gen_random(params, seeds[k]);
    const LpSolution solution = solve_lp(instance, 2);
    const auto check = check_second_level_cj(instance, solution.matching, js[k].first,
                                             js[k].second, fs[k]);
    violation[k] = (check.rhs - 1e-6) - check.lhs;
    if (solution.status != LpStatus::kOptimal) violation[k] = std::max(violation[k], 1.0);
    inputs[k] = "instance_seed=" + std::to_string(seeds[k]) + " " +
                describe({{"j1", double(js[k].first)},
                          {"j2", double(js[k].second)},
                          {"A", fs[k].a},
                          {"B", fs[k].b},
                          {"lhs", check.lhs},
                          {"rhs", check.rhs}});
  });
  for (int k = 0; k < trials; ++k) family.record(violation[k], inputs[k]);
}

}  // namespace

VerifierReport property_suite(std::uint64_t seed, int trials) {
  if (trials < 100) throw std::invalid_argument("property_suite needs trials >= 100");
  std::vector<Family> families;
  for (const char* name : {"amplification", "cdf_derivative", "ordered_jensen", "dr_hessian",
                           "pair_decay", "second_level_cj"}) {
    families.emplace_back(name);
  }
  const std::vector<std::function<void(Rng&, int, Family&)>> runners = {
      amplification_family, cdf_derivative_family, ordered_jensen_family,
      dr_hessian_family,     pair_decay_family,     second_level_cj_family};

  VerifierReport report;
  report.name = "properties";
  report.params = {{"seed", static_cast<double>(seed)}, {"trials", static_cast<double>(trials)}};
  report.target = "no failures in any family";
  report.pass = true;
  for (std::size_t k = 0; k < families.size(); ++k) {
    Rng rng(derive_seed(seed, k));
    runners[k](rng, trials, families[k]);
    report.values.emplace_back(families[k].name + "_failures", families[k].failures);
    report.values.emplace_back(families[k].name + "_worst_margin", families[k].worst);
    report.pass = report.pass && families[k].failures == 0;
    for (const auto& sample : families[k].samples) report.notes.push_back(sample);
  }
  return report;
}

}  // namespace stochmatch
