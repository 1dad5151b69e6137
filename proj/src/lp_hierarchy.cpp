#include "stochmatch/lp_hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "stochmatch/dense_lp.hpp"
#include "stochmatch/poisson.hpp"

namespace stochmatch {

std::string to_string(LpStatus status) {
  return status == LpStatus::kOptimal ? "optimal" : "iteration_limit";
}

std::string lp_solution_to_json(const Instance& instance, const LpSolution& solution) {
  nlohmann::ordered_json doc;
  doc["objective"] = solution.objective;
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (int i = 0; i < instance.type_count(); ++i) {
    for (const auto& edge : instance.types[i].edges) {
      const double v = solution.matching(i, edge.offline);
      if (v != 0.0) entries.push_back({{"i", i}, {"j", edge.offline}, {"v", v}});
    }
  }
  doc["x"] = std::move(entries);
  doc["cuts_added"] = solution.cuts_added;
  doc["status"] = to_string(solution.status);
  return doc.dump(2);
}

namespace {

// Calls visit(T) for every T subset of {0..n-1} with 1 <= |T| <= max_size,
// by size then lexicographically.
template <typename Visit>
void for_each_subset(int n, int max_size, Visit&& visit) {
  std::vector<int> subset;
  for (int m = 1; m <= std::min(max_size, n); ++m) {
    subset.resize(m);
    std::iota(subset.begin(), subset.end(), 0);
    while (true) {
      visit(subset);
      int k = m - 1;
      while (k >= 0 && subset[k] == n - m + k) --k;
      if (k < 0) break;
      ++subset[k];
      for (int r = k + 1; r < m; ++r) subset[r] = subset[r - 1] + 1;
    }
  }
}

// Best prefix cut for a fixed T, or a cut with violation <= tol.
Cut best_cut_for_subset(const Instance& instance, const FractionalMatching& x,
                        const std::vector<int>& offline) {
  const int n = instance.type_count();
  std::vector<double> mass(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j : offline) mass[i] += x(i, j);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return mass[a] / instance.types[a].rate > mass[b] / instance.types[b].rate;
  });

  const int m = static_cast<int>(offline.size());
  Cut best;
  best.offline = offline;
  best.violation = -std::numeric_limits<double>::infinity();
  int best_len = 0;
  double lhs = 0.0;
  double rate = 0.0;
  for (int k = 0; k < n; ++k) {
    lhs += mass[order[k]];
    rate += instance.types[order[k]].rate;
    const double rhs = poisson_capacity(m, rate);
    if (lhs - rhs > best.violation) {
      best.violation = lhs - rhs;
      best.lhs = lhs;
      best.rhs = rhs;
      best_len = k + 1;
    }
  }
  best.types.assign(order.begin(), order.begin() + best_len);
  std::sort(best.types.begin(), best.types.end());
  return best;
}

}  // namespace

std::vector<Cut> violated_cuts_per_subset(const Instance& instance,
                                          const FractionalMatching& x,
                                          int level, double tol) {
  if (level < 1) throw std::invalid_argument("separation oracle needs level >= 1");
  std::vector<Cut> cuts;
  for_each_subset(instance.offline_count, level, [&](const std::vector<int>& t) {
    Cut cut = best_cut_for_subset(instance, x, t);
    if (cut.violation > tol) cuts.push_back(std::move(cut));
  });
  return cuts;
}

std::optional<Cut> separation_oracle(const Instance& instance,
                                     const FractionalMatching& x, int level,
                                     double tol) {
  auto cuts = violated_cuts_per_subset(instance, x, level, tol);
  if (cuts.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    if (cuts[k].violation > cuts[best].violation) best = k;
  }
  return std::move(cuts[best]);
}

namespace {

struct EdgeIndex {
  std::vector<int> type;
  std::vector<int> offline;
  std::vector<double> weight;
  int size() const { return static_cast<int>(type.size()); }
};

EdgeIndex index_edges(const Instance& instance) {
  EdgeIndex edges;
  for (int i = 0; i < instance.type_count(); ++i) {
    for (const auto& edge : instance.types[i].edges) {
      edges.type.push_back(i);
      edges.offline.push_back(edge.offline);
      edges.weight.push_back(edge.weight);
    }
  }
  return edges;
}

FractionalMatching to_matching(const Instance& instance, const EdgeIndex& edges,
                               const std::vector<double>& values) {
  FractionalMatching x(instance.type_count(), instance.offline_count);
  for (int e = 0; e < edges.size(); ++e) x(edges.type[e], edges.offline[e]) = values[e];
  return x;
}

double objective_of(const EdgeIndex& edges, const std::vector<double>& values) {
  double total = 0.0;
  for (int e = 0; e < edges.size(); ++e) total += edges.weight[e] * values[e];
  return total;
}

void add_type_rows(const Instance& instance, const EdgeIndex& edges, int num_vars,
                   DenseLp& lp) {
  for (int i = 0; i < instance.type_count(); ++i) {
    std::vector<double> row(num_vars, 0.0);
    for (int e = 0; e < edges.size(); ++e) {
      if (edges.type[e] == i) row[e] = 1.0;
    }
    lp.add_row(row, instance.types[i].rate);
  }
}

void add_cut_row(const Cut& cut, const EdgeIndex& edges, int num_vars, DenseLp& lp) {
  std::vector<double> row(num_vars, 0.0);
  for (int e = 0; e < edges.size(); ++e) {
    if (std::binary_search(cut.types.begin(), cut.types.end(), edges.type[e]) &&
        std::find(cut.offline.begin(), cut.offline.end(), edges.offline[e]) !=
            cut.offline.end()) {
      row[e] = 1.0;
    }
  }
  lp.add_row(row, cut.rhs);
}

}  // namespace

LpSolution solve_lp(const Instance& instance, int level, double tol) {
  if (level < 0) throw std::invalid_argument("solve_lp: level must be >= 0");
  const EdgeIndex edges = index_edges(instance);
  const int num_vars = edges.size();

  DenseLp lp(num_vars);
  lp.set_objective(edges.weight);
  add_type_rows(instance, edges, num_vars, lp);

  LpSolution solution;
  if (level == 0) {
    for (int j = 0; j < instance.offline_count; ++j) {
      std::vector<double> row(num_vars, 0.0);
      for (int e = 0; e < edges.size(); ++e) {
        if (edges.offline[e] == j) row[e] = 1.0;
      }
      lp.add_row(row, 1.0);
    }
    const auto result = lp.solve();
    solution.matching = to_matching(instance, edges, result.x);
    solution.objective = objective_of(edges, result.x);
    solution.status = result.status == DenseLp::Status::kOptimal
                          ? LpStatus::kOptimal
                          : LpStatus::kIterationLimit;
    return solution;
  }

  std::vector<int> all_types(instance.type_count());
  std::iota(all_types.begin(), all_types.end(), 0);
  const double total_capacity = poisson_capacity(1, instance.total_rate());
  std::set<std::pair<std::vector<int>, std::vector<int>>> pool;
  for (int j = 0; j < instance.offline_count; ++j) {
    Cut cut{all_types, {j}, total_capacity, 0.0, 0.0};
    add_cut_row(cut, edges, num_vars, lp);
    pool.insert({cut.types, cut.offline});
  }

  const int cap = 50 * std::max(1, instance.type_count()) *
                  std::max(1, instance.offline_count);
  std::vector<double> values(num_vars, 0.0);
  solution.status = LpStatus::kIterationLimit;
  while (true) {
    const auto result = lp.solve();
    values = result.x;
    if (result.status != DenseLp::Status::kOptimal) break;
    const FractionalMatching x = to_matching(instance, edges, values);
    auto cuts = violated_cuts_per_subset(instance, x, level, tol);
    if (cuts.empty()) {
      solution.status = LpStatus::kOptimal;
      break;
    }
    bool added = false;
    for (auto& cut : cuts) {
      if (!pool.insert({cut.types, cut.offline}).second) continue;
      add_cut_row(cut, edges, num_vars, lp);
      ++solution.cuts_added;
      added = true;
    }
    // A repeated cut means the core solve cannot satisfy it to tol.
    if (!added || solution.cuts_added > cap) break;
  }

  solution.matching = to_matching(instance, edges, values);
  solution.objective = objective_of(edges, values);
  if (solution.status == LpStatus::kOptimal &&
      separation_oracle(instance, solution.matching, level, tol)) {
    solution.status = LpStatus::kIterationLimit;
  }
  return solution;
}

LpSolution solve_jaillet_lu_lp(const Instance& instance, double /*tol*/) {
  const EdgeIndex edges = index_edges(instance);
  const int num_edges = edges.size();
  const int num_vars = 2 * num_edges;  // x_e then u_e
  const double ln2 = std::log(2.0);

  DenseLp lp(num_vars);
  std::vector<double> c(num_vars, 0.0);
  for (int e = 0; e < num_edges; ++e) c[e] = edges.weight[e];
  lp.set_objective(c);
  add_type_rows(instance, edges, num_vars, lp);
  for (int j = 0; j < instance.offline_count; ++j) {
    std::vector<double> load(num_vars, 0.0);
    std::vector<double> excess(num_vars, 0.0);
    for (int e = 0; e < num_edges; ++e) {
      if (edges.offline[e] != j) continue;
      load[e] = 1.0;
      excess[num_edges + e] = 1.0;
    }
    lp.add_row(load, 1.0);
    lp.add_row(excess, 1.0 - ln2);
  }
  // 2 x_e - u_e <= lambda_i
  for (int e = 0; e < num_edges; ++e) {
    std::vector<double> row(num_vars, 0.0);
    row[e] = 2.0;
    row[num_edges + e] = -1.0;
    lp.add_row(row, instance.types[edges.type[e]].rate);
  }

  const auto result = lp.solve();
  std::vector<double> values(result.x.begin(), result.x.begin() + num_edges);
  LpSolution solution;
  solution.matching = to_matching(instance, edges, values);
  solution.objective = objective_of(edges, values);
  solution.status = result.status == DenseLp::Status::kOptimal
                        ? LpStatus::kOptimal
                        : LpStatus::kIterationLimit;
  return solution;
}

ConverseJensenReport check_converse_jensen_c3(const Instance& instance,
                                              const FractionalMatching& x,
                                              double tol) {
  ConverseJensenReport report;
  report.bound = 0.5 * (1.0 - std::log(2.0));
  report.excess.assign(instance.offline_count, 0.0);
  for (int j = 0; j < instance.offline_count; ++j) {
    for (int i = 0; i < instance.type_count(); ++i) {
      report.excess[j] += std::max(0.0, x(i, j) - 0.5 * instance.types[i].rate);
    }
    if (report.excess[j] > report.bound + tol) report.pass = false;
  }
  return report;
}

}  // namespace stochmatch
