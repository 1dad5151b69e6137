#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "stochmatch/instance.hpp"

namespace stochmatch::testing {

struct TypeSpec {
  double rate;
  std::vector<std::pair<int, double>> edges;  // (offline, weight)
};

inline Instance make_instance(int offline_count, std::initializer_list<TypeSpec> types,
                              WeightClass weight_class = WeightClass::kUnweighted,
                              bool free_disposal = false) {
  Instance instance;
  instance.offline_count = offline_count;
  instance.weight_class = weight_class;
  instance.free_disposal = free_disposal;
  for (const auto& spec : types) {
    OnlineType type;
    type.rate = spec.rate;
    for (const auto& [j, w] : spec.edges) type.edges.push_back({j, w});
    instance.types.push_back(type);
  }
  return instance;
}

// Unweighted K_{1,1} with rate lambda.
inline Instance single_edge(double lambda = 1.0) {
  return make_instance(1, {{lambda, {{0, 1.0}}}});
}

}  // namespace stochmatch::testing
