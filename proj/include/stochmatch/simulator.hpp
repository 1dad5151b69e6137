#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stochmatch/arrivals.hpp"
#include "stochmatch/instance.hpp"
#include "stochmatch/online.hpp"

namespace stochmatch {

/// Stable sub-seed for a labelled stream (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label);

/// Poisson arrival model: each type arrives at rate lambda_i over [0, 1].
ArrivalSequence sample_poisson_arrivals(const Instance& instance, std::uint64_t seed);

/// Original model: total_arrivals vertices at times k / total_arrivals, each
/// drawing type i with probability lambda_i / sum(lambda).
ArrivalSequence sample_fixed_arrivals(const Instance& instance, int total_arrivals,
                                      std::uint64_t seed);

struct ArrivalModel {
  enum class Kind { kPoisson, kFixed };
  Kind kind = Kind::kPoisson;
  int total_arrivals = 0;  // fixed model only

  static ArrivalModel poisson() { return {Kind::kPoisson, 0}; }
  static ArrivalModel fixed(int total) { return {Kind::kFixed, total}; }
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct McReport {
  double alg_mean = 0.0;
  double opt_mean = 0.0;
  double ratio = 0.0;  // alg_mean / opt_mean
  double alg_stderr = 0.0;
  double opt_stderr = 0.0;
  long trials = 0;
  std::vector<Estimate> per_vertex_match_prob;
};

struct TrialRecord {
  double alg = 0.0;
  double opt = 0.0;
};

/// Monte Carlo competitive-ratio estimate. Trial k uses seed derive_seed(seed, k),
/// and trials are reduced in fixed blocks, so the report does not depend on
/// the thread count. per_trial, when given, receives every (alg, opt) pair.
McReport monte_carlo(const Instance& instance, const FractionalMatching& x,
                     Algorithm algorithm, long trials, std::uint64_t seed,
                     ArrivalModel model,
                     std::vector<TrialRecord>* per_trial = nullptr);

/// Exact E[ALG] in the fixed-arrival model (arrival k at time k / total) by
/// dynamic programming over match states. Throws std::invalid_argument when
/// the instance or total_arrivals exceed the enumeration budget.
double exact_expected_value(const Instance& instance, const FractionalMatching& x,
                            Algorithm algorithm, int total_arrivals);

/// Monte Carlo estimate of Pr[every j in offline_subset is unmatched at time t]
/// under Poisson OCS with Poisson arrivals.
Estimate unmatched_probability_estimate(const Instance& instance,
                                        const FractionalMatching& x,
                                        const std::vector<int>& offline_subset,
                                        double t, long trials, std::uint64_t seed);

std::string mc_report_to_json(const McReport& report);
std::string trials_to_csv(const std::vector<TrialRecord>& records);

}  // namespace stochmatch
