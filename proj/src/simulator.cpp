#include "stochmatch/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "stochmatch/offline_opt.hpp"
#include "stochmatch/parallel.hpp"

namespace stochmatch {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) {
  std::uint64_t z = (seed ^ label) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

constexpr std::uint64_t kArrivalStream = 0x61727276ULL;
constexpr std::uint64_t kDecisionStream = 0x64656369ULL;
constexpr int kBlockSize = 1024;

void make_strictly_increasing(ArrivalSequence& arrivals) {
  for (std::size_t k = 1; k < arrivals.size(); ++k) {
    if (arrivals[k].time <= arrivals[k - 1].time) {
      arrivals[k].time = std::nextafter(arrivals[k - 1].time, 2.0);
    }
  }
}

// Streaming mean and centered second moment, mergeable in a fixed order.
struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double value) {
    count += 1.0;
    const double delta = value - mean;
    mean += delta / count;
    m2 += delta * (value - mean);
  }
  void merge(const Moments& other) {
    if (other.count == 0.0) return;
    const double total = count + other.count;
    const double delta = other.mean - mean;
    mean += delta * other.count / total;
    m2 += other.m2 + delta * delta * count * other.count / total;
    count = total;
  }
  double std_error() const {
    return count > 1.0 ? std::sqrt(m2 / (count - 1.0) / count) : 0.0;
  }
};

}  // namespace

ArrivalSequence sample_poisson_arrivals(const Instance& instance, std::uint64_t seed) {
  Engine engine(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ArrivalSequence arrivals;
  for (int i = 0; i < instance.type_count(); ++i) {
    std::poisson_distribution<int> count(instance.types[i].rate);
    const int n = count(engine);
    for (int k = 0; k < n; ++k) arrivals.push_back({unit(engine), i});
  }
  std::sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) {
    return a.time != b.time ? a.time < b.time : a.type < b.type;
  });
  make_strictly_increasing(arrivals);
  return arrivals;
}

ArrivalSequence sample_fixed_arrivals(const Instance& instance, int total_arrivals,
                                      std::uint64_t seed) {
  if (total_arrivals < 0) throw std::invalid_argument("total_arrivals must be >= 0");
  std::vector<double> rates;
  for (const auto& type : instance.types) rates.push_back(type.rate);
  std::discrete_distribution<int> pick(rates.begin(), rates.end());
  Engine engine(seed);
  ArrivalSequence arrivals;
  for (int k = 1; k <= total_arrivals; ++k) {
    arrivals.push_back({static_cast<double>(k) / total_arrivals, pick(engine)});
  }
  return arrivals;
}

McReport monte_carlo(const Instance& instance, const FractionalMatching& x,
                     Algorithm algorithm, long trials, std::uint64_t seed,
                     ArrivalModel model, std::vector<TrialRecord>* per_trial) {
  if (trials < 2) throw std::invalid_argument("monte_carlo needs at least 2 trials");
  const OnlinePolicy policy(instance, x, algorithm);
  const int offline = instance.offline_count;
  const int blocks = static_cast<int>((trials + kBlockSize - 1) / kBlockSize);

  struct Block {
    Moments alg, opt;
    std::vector<long> matched;
  };
  std::vector<Block> results(blocks);
  if (per_trial) per_trial->assign(trials, {});

  parallel_for(blocks, [&](int b) {
    Block& block = results[b];
    block.matched.assign(offline, 0);
    const long first = static_cast<long>(b) * kBlockSize;
    const long last = std::min(trials, first + kBlockSize);
    for (long k = first; k < last; ++k) {
      const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(k));
      const ArrivalSequence arrivals =
          model.kind == ArrivalModel::Kind::kPoisson
              ? sample_poisson_arrivals(instance, derive_seed(trial_seed, kArrivalStream))
              : sample_fixed_arrivals(instance, model.total_arrivals,
                                      derive_seed(trial_seed, kArrivalStream));
      MatchState state(offline);
      Engine engine(derive_seed(trial_seed, kDecisionStream));
      run_policy(policy, arrivals, engine, state);
      const double opt = max_weight_matching(realized_graph(instance, arrivals)).value;
      block.alg.add(state.objective);
      block.opt.add(opt);
      for (int j = 0; j < offline; ++j) block.matched[j] += state.matched[j] ? 1 : 0;
      if (per_trial) (*per_trial)[k] = {state.objective, opt};
    }
  });

  Moments alg, opt;
  std::vector<long> matched(offline, 0);
  for (const auto& block : results) {
    alg.merge(block.alg);
    opt.merge(block.opt);
    for (int j = 0; j < offline; ++j) matched[j] += block.matched[j];
  }

  McReport report;
  report.trials = trials;
  report.alg_mean = alg.mean;
  report.opt_mean = opt.mean;
  report.alg_stderr = alg.std_error();
  report.opt_stderr = opt.std_error();
  report.ratio = opt.mean > 0.0 ? alg.mean / opt.mean : 0.0;
  const double n = static_cast<double>(trials);
  for (int j = 0; j < offline; ++j) {
    const double p = matched[j] / n;
    report.per_vertex_match_prob.push_back({p, std::sqrt(p * (1.0 - p) / (n - 1.0))});
  }
  return report;
}

double exact_expected_value(const Instance& instance, const FractionalMatching& x,
                            Algorithm algorithm, int total_arrivals) {
  constexpr int kMaxArrivals = 12;
  constexpr int kMaxOffline = 12;
  constexpr int kMaxTypes = 16;
  constexpr std::size_t kMaxStates = 2'000'000;
  if (total_arrivals < 0 || total_arrivals > kMaxArrivals ||
      instance.offline_count > kMaxOffline || instance.type_count() > kMaxTypes) {
    throw std::invalid_argument("exact_expected_value: beyond the enumeration budget");
  }
  if (total_arrivals == 0) return 0.0;

  const OnlinePolicy policy(instance, x, algorithm);
  const double total_rate = instance.total_rate();

  using Key = std::pair<std::vector<double>, std::vector<bool>>;
  std::map<Key, double> layer;
  MatchState empty(instance.offline_count);
  layer[{empty.best_weight, empty.matched}] = 1.0;

  for (int k = 1; k <= total_arrivals; ++k) {
    const double t = static_cast<double>(k) / total_arrivals;
    std::map<Key, double> next;
    for (const auto& [key, mass] : layer) {
      MatchState state(instance.offline_count);
      state.best_weight = key.first;
      state.matched = key.second;
      for (int i = 0; i < instance.type_count(); ++i) {
        const double type_prob = instance.types[i].rate / total_rate;
        for (const auto& outcome : policy.distribution(state, i, t)) {
          if (!(outcome.probability > 0.0)) continue;
          MatchState after = state;
          policy.apply(after, i, outcome.offline);
          next[{after.best_weight, after.matched}] += mass * type_prob * outcome.probability;
        }
      }
      if (next.size() > kMaxStates) {
        throw std::invalid_argument("exact_expected_value: state space too large");
      }
    }
    layer = std::move(next);
  }

  double expected = 0.0;
  for (const auto& [key, mass] : layer) {
    double objective = 0.0;
    for (double w : key.first) objective += w;
    expected += mass * objective;
  }
  return expected;
}

Estimate unmatched_probability_estimate(const Instance& instance,
                                        const FractionalMatching& x,
                                        const std::vector<int>& offline_subset,
                                        double t, long trials, std::uint64_t seed) {
  if (offline_subset.empty()) throw std::invalid_argument("offline subset must be nonempty");
  if (trials < 2) throw std::invalid_argument("need at least 2 trials");
  const OnlinePolicy policy(instance, x, Algorithm::kPoissonOcs);
  const int blocks = static_cast<int>((trials + kBlockSize - 1) / kBlockSize);
  std::vector<long> hits(blocks, 0);
  parallel_for(blocks, [&](int b) {
    const long first = static_cast<long>(b) * kBlockSize;
    const long last = std::min(trials, first + kBlockSize);
    for (long k = first; k < last; ++k) {
      const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(k));
      ArrivalSequence arrivals =
          sample_poisson_arrivals(instance, derive_seed(trial_seed, kArrivalStream));
      arrivals.erase(std::find_if(arrivals.begin(), arrivals.end(),
                                  [t](const Arrival& a) { return a.time >= t; }),
                     arrivals.end());
      MatchState state(instance.offline_count);
      Engine engine(derive_seed(trial_seed, kDecisionStream));
      run_policy(policy, arrivals, engine, state);
      const bool all_unmatched = std::none_of(
          offline_subset.begin(), offline_subset.end(),
          [&](int j) { return static_cast<bool>(state.matched[j]); });
      if (all_unmatched) ++hits[b];
    }
  });
  long total = 0;
  for (long h : hits) total += h;
  const double n = static_cast<double>(trials);
  const double p = total / n;
  return {p, std::sqrt(p * (1.0 - p) / (n - 1.0))};
}

std::string mc_report_to_json(const McReport& report) {
  nlohmann::json doc;
  doc["alg_mean"] = report.alg_mean;
  doc["opt_mean"] = report.opt_mean;
  doc["ratio"] = report.ratio;
  doc["alg_stderr"] = report.alg_stderr;
  doc["opt_stderr"] = report.opt_stderr;
  doc["trials"] = report.trials;
  nlohmann::json per_vertex = nlohmann::json::array();
  for (const auto& estimate : report.per_vertex_match_prob) {
    per_vertex.push_back({{"estimate", estimate.value}, {"stderr", estimate.std_error}});
  }
  doc["per_vertex_match_prob"] = std::move(per_vertex);
  return doc.dump(2);
}

std::string trials_to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  out.precision(17);
  out << "alg_value,opt_value\n";
  for (const auto& record : records) out << record.alg << ',' << record.opt << '\n';
  return out.str();
}

}  // namespace stochmatch
