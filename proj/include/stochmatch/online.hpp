#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "stochmatch/arrivals.hpp"
#include "stochmatch/instance.hpp"

namespace stochmatch {

enum class Algorithm { kSuggestedMatching, kTopHalfSampling, kPoissonOcs, kGreedy };

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

/// Online matching state. best_weight[j] is w_j(t), the heaviest weight
/// matched to j so far (0 when unmatched).
struct MatchState {
  std::vector<double> best_weight;
  std::vector<bool> matched;
  double objective = 0.0;
  double time = 0.0;

  explicit MatchState(int offline_count = 0)
      : best_weight(offline_count, 0.0), matched(offline_count, false) {}
};

/// One possible result of an arrival. offline == -1 is the dummy (no-op).
struct Outcome {
  int offline = -1;
  double probability = 0.0;
};

struct Decision {
  int offline = -1;  // -1 when nothing changed
  double gain = 0.0;
};

/// An online algorithm bound to an instance and a fractional matching.
///
/// Each arrival consumes one uniform u in [0, 1) and selects an outcome by
/// inverse CDF over `distribution`, so a step is a pure function of
/// (state, type, time, u). Throws std::invalid_argument when the algorithm
/// does not support the instance's weight class or x is infeasible for it.
class OnlinePolicy {
 public:
  OnlinePolicy(const Instance& instance, const FractionalMatching& x,
               Algorithm algorithm);

  Algorithm algorithm() const { return algorithm_; }
  const Instance& instance() const { return *instance_; }

  /// Outcomes in inverse-CDF order; probabilities sum to 1.
  std::vector<Outcome> distribution(const MatchState& state, int type,
                                    double time) const;

  Decision step(MatchState& state, int type, double time, double u) const;

  /// (w_ij - w_j(t))^+ with free disposal; otherwise w_ij if j is unmatched, else 0.
  double marginal(const MatchState& state, int type, const Edge& edge) const;

  /// Applies a chosen outcome (offline == -1 leaves the state unchanged).
  Decision apply(MatchState& state, int type, int offline) const;

 private:

  const Instance* instance_;
  const FractionalMatching* x_;
  Algorithm algorithm_;
  std::vector<double> load_;
};

/// Single-step entry points. Each builds a policy for the call.
Decision top_half_step(const Instance& instance, const FractionalMatching& x,
                       MatchState& state, int type, double time, double u);
Decision poisson_ocs_step(const Instance& instance, const FractionalMatching& x,
                          MatchState& state, int type, double time, double u);
Decision suggested_step(const Instance& instance, const FractionalMatching& x,
                        MatchState& state, int type, double time, double u);
Decision greedy_step(const Instance& instance, const FractionalMatching& x,
                     MatchState& state, int type, double time, double u);

struct TraceRow {
  double time = 0.0;
  int type = 0;
  int offline = -1;
  double gain = 0.0;
};

struct OnlineRun {
  MatchState state;
  std::vector<TraceRow> trace;
};

/// Uniform draws for run_online come from this engine, seeded directly.
using Engine = std::mt19937_64;

/// Folds the policy over arrivals, one uniform draw per arrival from `engine`.
void run_policy(const OnlinePolicy& policy, const ArrivalSequence& arrivals,
                Engine& engine, MatchState& state,
                std::vector<TraceRow>* trace = nullptr);

OnlineRun run_online(const Instance& instance, const FractionalMatching& x,
                     Algorithm algorithm, const ArrivalSequence& arrivals,
                     std::uint64_t seed);

/// CSV rows "t,type,chosen_j,marginal_gain" with a header line.
std::string trace_to_csv(const std::vector<TraceRow>& trace);

}  // namespace stochmatch
