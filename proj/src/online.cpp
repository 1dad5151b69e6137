#include "stochmatch/online.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace stochmatch {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kSuggestedMatching:
      return "suggested";
    case Algorithm::kTopHalfSampling:
      return "top-half";
    case Algorithm::kPoissonOcs:
      return "ocs";
    case Algorithm::kGreedy:
      return "greedy";
  }
  return "greedy";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "suggested") return Algorithm::kSuggestedMatching;
  if (name == "top-half") return Algorithm::kTopHalfSampling;
  if (name == "ocs") return Algorithm::kPoissonOcs;
  if (name == "greedy") return Algorithm::kGreedy;
  throw std::invalid_argument("unknown algorithm: " + name);
}

namespace {

constexpr double kFeasibilityTol = 1e-9;

}  // namespace

OnlinePolicy::OnlinePolicy(const Instance& instance, const FractionalMatching& x,
                           Algorithm algorithm)
    : instance_(&instance), x_(&x), algorithm_(algorithm) {
  if (x.type_count() != instance.type_count() ||
      x.offline_count() != instance.offline_count) {
    throw std::invalid_argument("fractional matching does not fit the instance");
  }
  load_.resize(instance.offline_count);
  for (int j = 0; j < instance.offline_count; ++j) load_[j] = x.load(j);
  if (algorithm == Algorithm::kGreedy) return;

  for (int i = 0; i < instance.type_count(); ++i) {
    if (x.type_mass(i) > instance.types[i].rate + kFeasibilityTol) {
      throw std::invalid_argument("x exceeds the arrival rate of type " +
                                  std::to_string(i));
    }
  }
  if (algorithm == Algorithm::kPoissonOcs) {
    if (instance.weight_class == WeightClass::kEdgeWeighted) {
      throw std::invalid_argument(
          "Poisson OCS needs an unweighted or vertex-weighted instance");
    }
    for (double load : load_) {
      if (load > 1.0 + kFeasibilityTol) {
        throw std::invalid_argument("Poisson OCS needs x_j <= 1 for every offline vertex");
      }
    }
  }
}

double OnlinePolicy::marginal(const MatchState& state, int /*type*/,
                              const Edge& edge) const {
  if (instance_->disposes()) {
    return std::max(0.0, edge.weight - state.best_weight[edge.offline]);
  }
  return state.matched[edge.offline] ? 0.0 : edge.weight;
}

std::vector<Outcome> OnlinePolicy::distribution(const MatchState& state, int type,
                                                double time) const {
  const OnlineType& online = instance_->types[type];
  std::vector<Outcome> outcomes;
  double assigned = 0.0;

  switch (algorithm_) {
    case Algorithm::kTopHalfSampling: {
      std::vector<std::pair<double, int>> order;  // (marginal, offline)
      for (const auto& edge : online.edges) {
        order.emplace_back(marginal(state, type, edge), edge.offline);
      }
      std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      const double half = 0.5 * online.rate;
      double start = 0.0;
      for (const auto& [gain, j] : order) {
        const double end = start + (*x_)(type, j);
        const double covered = std::max(0.0, std::min(end, half) - start);
        if (covered > 0.0) {
          outcomes.push_back({j, covered / half});
          assigned += covered / half;
        }
        start = end;
        if (start >= half) break;
      }
      break;
    }
    case Algorithm::kSuggestedMatching: {
      std::vector<int> order;
      for (const auto& edge : online.edges) order.push_back(edge.offline);
      std::sort(order.begin(), order.end());
      for (int j : order) {
        const double p = (*x_)(type, j) / online.rate;
        if (p > 0.0) {
          outcomes.push_back({j, p});
          assigned += p;
        }
      }
      break;
    }
    case Algorithm::kPoissonOcs: {
      double total = 0.0;
      for (const auto& edge : online.edges) {
        const int j = edge.offline;
        const double rho = (*x_)(type, j) / online.rate;
        if (state.matched[j] || !(rho > 0.0)) continue;
        const double score = std::exp(time * load_[j]) * rho;
        outcomes.push_back({j, score});
        total += score;
      }
      for (auto& outcome : outcomes) outcome.probability /= total;
      assigned = outcomes.empty() ? 0.0 : 1.0;
      break;
    }
    case Algorithm::kGreedy: {
      int best = -1;
      double best_gain = 0.0;
      for (const auto& edge : online.edges) {
        const double gain = marginal(state, type, edge);
        if (gain > best_gain || (gain == best_gain && gain > 0.0 && edge.offline < best)) {
          best_gain = gain;
          best = edge.offline;
        }
      }
      if (best >= 0) {
        outcomes.push_back({best, 1.0});
        assigned = 1.0;
      }
      break;
    }
  }
  if (assigned < 1.0) outcomes.push_back({-1, 1.0 - assigned});
  return outcomes;
}

Decision OnlinePolicy::apply(MatchState& state, int type, int offline) const {
  Decision decision;
  if (offline < 0) return decision;
  const double w = instance_->weight(type, offline);
  if (instance_->disposes()) {
    const double gain = std::max(0.0, w - state.best_weight[offline]);
    state.matched[offline] = true;
    if (gain > 0.0) {
      state.best_weight[offline] = w;
      state.objective += gain;
    }
    decision = {offline, gain};
  } else if (!state.matched[offline]) {
    state.matched[offline] = true;
    state.best_weight[offline] = w;
    state.objective += w;
    decision = {offline, w};
  }
  return decision;
}

Decision OnlinePolicy::step(MatchState& state, int type, double time, double u) const {
  const auto outcomes = distribution(state, type, time);
  int chosen = -1;
  double cumulative = 0.0;
  for (const auto& outcome : outcomes) {
    cumulative += outcome.probability;
    if (outcome.probability > 0.0) chosen = outcome.offline;
    if (u < cumulative) break;
  }
  state.time = time;
  return apply(state, type, chosen);
}

Decision top_half_step(const Instance& instance, const FractionalMatching& x,
                       MatchState& state, int type, double time, double u) {
  return OnlinePolicy(instance, x, Algorithm::kTopHalfSampling).step(state, type, time, u);
}

Decision poisson_ocs_step(const Instance& instance, const FractionalMatching& x,
                          MatchState& state, int type, double time, double u) {
  return OnlinePolicy(instance, x, Algorithm::kPoissonOcs).step(state, type, time, u);
}

Decision suggested_step(const Instance& instance, const FractionalMatching& x,
                        MatchState& state, int type, double time, double u) {
  return OnlinePolicy(instance, x, Algorithm::kSuggestedMatching)
      .step(state, type, time, u);
}

Decision greedy_step(const Instance& instance, const FractionalMatching& x,
                     MatchState& state, int type, double time, double u) {
  return OnlinePolicy(instance, x, Algorithm::kGreedy).step(state, type, time, u);
}

void run_policy(const OnlinePolicy& policy, const ArrivalSequence& arrivals,
                Engine& engine, MatchState& state, std::vector<TraceRow>* trace) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& arrival : arrivals) {
    const double u = unit(engine);
    const Decision decision = policy.step(state, arrival.type, arrival.time, u);
    if (trace) trace->push_back({arrival.time, arrival.type, decision.offline, decision.gain});
  }
}

OnlineRun run_online(const Instance& instance, const FractionalMatching& x,
                     Algorithm algorithm, const ArrivalSequence& arrivals,
                     std::uint64_t seed) {
  if (auto violation = validate(instance)) {
    throw std::invalid_argument("invalid instance: " + *violation);
  }
  const OnlinePolicy policy(instance, x, algorithm);
  for (std::size_t k = 1; k < arrivals.size(); ++k) {
    if (arrivals[k].time < arrivals[k - 1].time) {
      throw std::invalid_argument("arrivals must be sorted by time");
    }
  }
  OnlineRun run{MatchState(instance.offline_count), {}};
  Engine engine(seed);
  run_policy(policy, arrivals, engine, run.state, &run.trace);
  return run;
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "t,type,chosen_j,marginal_gain\n";
  for (const auto& row : trace) {
    out << row.time << ',' << row.type << ',' << row.offline << ',' << row.gain << '\n';
  }
  return out.str();
}

}  // namespace stochmatch
