#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>

#include "stochmatch/lp_hierarchy.hpp"
#include "stochmatch/simulator.hpp"
#include "test_util.hpp"

namespace stochmatch {
namespace {

using testing::make_instance;
using testing::single_edge;

TEST(ArrivalsTest, PoissonCountMean) {
  const Instance instance = make_instance(1, {{0.5, {{0, 1.0}}}, {1.5, {{0, 1.0}}}});
  const int runs = 20000;
  double sum = 0.0;
  int empty = 0;
  const Instance unit = single_edge(1.0);
  for (int k = 0; k < runs; ++k) {
    const auto arrivals = sample_poisson_arrivals(instance, k);
    sum += arrivals.size();
    for (std::size_t a = 0; a < arrivals.size(); ++a) {
      ASSERT_GE(arrivals[a].time, 0.0);
      ASSERT_LE(arrivals[a].time, 1.0);
      if (a > 0) ASSERT_LT(arrivals[a - 1].time, arrivals[a].time);
    }
    empty += sample_poisson_arrivals(unit, k + runs).empty();
  }
  EXPECT_NEAR(sum / runs, 2.0, 3.0 * std::sqrt(2.0 / runs));
  const double p0 = std::exp(-1.0);
  EXPECT_NEAR(empty / double(runs), p0, 3.0 * std::sqrt(p0 * (1 - p0) / runs));
}

TEST(ArrivalsTest, Deterministic) {
  const Instance instance = gen_jaillet_lu();
  const auto a = sample_poisson_arrivals(instance, 5);
  const auto b = sample_poisson_arrivals(instance, 5);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].time, b[k].time);
    EXPECT_EQ(a[k].type, b[k].type);
  }
}

TEST(ArrivalsTest, FixedModel) {
  const Instance one = single_edge();
  const auto single = sample_fixed_arrivals(one, 1, 3);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].time, 1.0);

  const Instance instance = make_instance(1, {{0.25, {{0, 1.0}}}, {0.75, {{0, 1.0}}}});
  const int runs = 4000;
  int second = 0;
  for (int k = 0; k < runs; ++k) {
    const auto arrivals = sample_fixed_arrivals(instance, 5, k);
    ASSERT_EQ(arrivals.size(), 5u);
    for (int a = 0; a < 5; ++a) {
      EXPECT_DOUBLE_EQ(arrivals[a].time, (a + 1) / 5.0);
      second += arrivals[a].type == 1;
    }
  }
  const double n = 5.0 * runs;
  EXPECT_NEAR(second / n, 0.75, 3.0 * std::sqrt(0.75 * 0.25 / n));
  EXPECT_THROW(sample_fixed_arrivals(instance, -1, 0), std::invalid_argument);
}

TEST(MonteCarloTest, ThreadCountDoesNotChangeResult) {
  const Instance instance = gen_jaillet_lu();
  const LpSolution lp = solve_lp(instance, 1);
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "3"}) {
    setenv("STOCHMATCH_THREADS", threads, 1);
    outputs.push_back(mc_report_to_json(monte_carlo(instance, lp.matching, Algorithm::kPoissonOcs,
                                                    5000, 11, ArrivalModel::poisson())));
  }
  unsetenv("STOCHMATCH_THREADS");
  EXPECT_EQ(outputs[0], outputs[1]);
}

TEST(MonteCarloTest, PerTrialRecordsAndCsv) {
  const Instance instance = single_edge();
  FractionalMatching x(1, 1);
  x(0, 0) = 1.0 - std::exp(-1.0);
  std::vector<TrialRecord> records;
  const McReport report =
      monte_carlo(instance, x, Algorithm::kGreedy, 1000, 2, ArrivalModel::poisson(), &records);
  ASSERT_EQ(records.size(), 1000u);
  double alg = 0.0;
  for (const auto& record : records) {
    EXPECT_EQ(record.alg, record.opt);
    alg += record.alg;
  }
  EXPECT_NEAR(report.alg_mean, alg / 1000.0, 1e-12);
  EXPECT_NEAR(report.ratio, 1.0, 1e-12);
  const std::string csv = trials_to_csv(records);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "alg_value,opt_value");
  EXPECT_THROW(monte_carlo(instance, x, Algorithm::kGreedy, 1, 2, ArrivalModel::poisson()),
               std::invalid_argument);
}

// Enumerates every type sequence and every outcome path without merging states.
double enumerate_expected(const Instance& instance, const FractionalMatching& x,
                          Algorithm algorithm, int total) {
  const OnlinePolicy policy(instance, x, algorithm);
  const double total_rate = instance.total_rate();
  std::function<double(MatchState, int)> visit = [&](MatchState state, int k) -> double {
    if (k > total) return state.objective;
    const double t = static_cast<double>(k) / total;
    double value = 0.0;
    for (int i = 0; i < instance.type_count(); ++i) {
      const double type_prob = instance.types[i].rate / total_rate;
      for (const auto& outcome : policy.distribution(state, i, t)) {
        if (outcome.probability <= 0.0) continue;
        MatchState next = state;
        next.time = t;
        policy.apply(next, i, outcome.offline);
        value += type_prob * outcome.probability * visit(next, k + 1);
      }
    }
    return value;
  };
  return visit(MatchState(instance.offline_count), 1);
}

TEST(ExactTest, TrivialCases) {
  const Instance instance = single_edge();
  FractionalMatching x(1, 1);
  x(0, 0) = 0.6;
  EXPECT_EQ(exact_expected_value(instance, x, Algorithm::kPoissonOcs, 0), 0.0);
  EXPECT_NEAR(exact_expected_value(instance, x, Algorithm::kPoissonOcs, 1), 1.0, 1e-15);
  EXPECT_NEAR(exact_expected_value(instance, x, Algorithm::kSuggestedMatching, 2),
              1.0 - 0.4 * 0.4, 1e-15);
  EXPECT_THROW(exact_expected_value(instance, x, Algorithm::kGreedy, 100), std::invalid_argument);
}

TEST(ExactTest, MatchesPathEnumeration) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    RandomInstanceParams params;
    params.n_types = 3;
    params.n_offline = 3;
    params.edge_prob = 0.7;
    params.weight_class = seed % 3 == 0   ? WeightClass::kEdgeWeighted
                          : seed % 3 == 1 ? WeightClass::kVertexWeighted
                                          : WeightClass::kUnweighted;
    params.free_disposal = seed % 2 == 0;
    const Instance instance = gen_random(params, seed);
    const LpSolution lp = solve_lp(instance, 1);
    for (auto algorithm : {Algorithm::kSuggestedMatching, Algorithm::kTopHalfSampling,
                           Algorithm::kPoissonOcs, Algorithm::kGreedy}) {
      if (algorithm == Algorithm::kPoissonOcs &&
          instance.weight_class == WeightClass::kEdgeWeighted) {
        continue;
      }
      const double exact = exact_expected_value(instance, lp.matching, algorithm, 4);
      const double brute = enumerate_expected(instance, lp.matching, algorithm, 4);
      EXPECT_NEAR(exact, brute, 1e-12) << "seed " << seed << " " << to_string(algorithm);
    }
  }
}

TEST(ExactTest, AgreesWithMonteCarlo) {
  RandomInstanceParams params;
  params.n_types = 3;
  params.n_offline = 3;
  params.edge_prob = 0.8;
  params.weight_class = WeightClass::kVertexWeighted;
  const Instance instance = gen_random(params, 77);
  const LpSolution lp = solve_lp(instance, 2);
  for (auto algorithm : {Algorithm::kSuggestedMatching, Algorithm::kTopHalfSampling,
                         Algorithm::kPoissonOcs, Algorithm::kGreedy}) {
    const double exact = exact_expected_value(instance, lp.matching, algorithm, 4);
    const McReport mc =
        monte_carlo(instance, lp.matching, algorithm, 100000, 5, ArrivalModel::fixed(4));
    EXPECT_NEAR(mc.alg_mean, exact, 4.0 * mc.alg_stderr) << to_string(algorithm);
  }
}

TEST(UnmatchedTest, StartAndDecayBound) {
  RandomInstanceParams params;
  params.n_types = 4;
  params.n_offline = 3;
  params.edge_prob = 0.8;
  const Instance instance = gen_random(params, 9);
  const LpSolution lp = solve_lp(instance, 2);
  EXPECT_EQ(unmatched_probability_estimate(instance, lp.matching, {0, 1}, 0.0, 100, 1).value, 1.0);
  for (int j = 0; j < 3; ++j) {
    for (double t : {0.3, 0.7, 1.0}) {
      const Estimate estimate =
          unmatched_probability_estimate(instance, lp.matching, {j}, t, 40000, 3 + j);
      EXPECT_LE(estimate.value,
                std::exp(-t * lp.matching.load(j)) + 3.0 * estimate.std_error + 1e-12);
    }
  }
}

TEST(SuggestedTest, PoissonThinning) {
  RandomInstanceParams params;
  params.n_types = 4;
  params.n_offline = 3;
  params.edge_prob = 0.7;
  const Instance instance = gen_random(params, 21);
  const LpSolution lp = solve_lp(instance, 1);
  const McReport mc = monte_carlo(instance, lp.matching, Algorithm::kSuggestedMatching, 100000,
                                  8, ArrivalModel::poisson());
  ASSERT_EQ(mc.per_vertex_match_prob.size(), 3u);
  for (int j = 0; j < 3; ++j) {
    const auto& estimate = mc.per_vertex_match_prob[j];
    EXPECT_NEAR(estimate.value, 1.0 - std::exp(-lp.matching.load(j)),
                3.0 * estimate.std_error + 1e-12);
  }
}

TEST(SeedTest, DeriveSeedSpreads) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

}  // namespace
}  // namespace stochmatch
