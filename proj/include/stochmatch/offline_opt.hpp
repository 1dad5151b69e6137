#pragma once

#include <utility>
#include <vector>

#include "stochmatch/arrivals.hpp"
#include "stochmatch/instance.hpp"

namespace stochmatch {

struct RealizedEdge {
  int arrival = 0;
  int offline = 0;
  double weight = 0.0;
};

/// Realized bipartite graph: one left vertex per arrival carrying its type's edges.
struct RealizedGraph {
  ArrivalSequence arrivals;
  int offline_count = 0;
  std::vector<RealizedEdge> edges;
};

RealizedGraph realized_graph(const Instance& instance, const ArrivalSequence& arrivals);

struct OfflineMatching {
  double value = 0.0;
  std::vector<std::pair<int, int>> pairs;  // (arrival, offline)
};

/// Exact maximum-weight bipartite matching (Hungarian method on the dense
/// weight matrix, missing edges weigh 0). Zero-weight assignments are dropped.
OfflineMatching max_weight_matching(const RealizedGraph& graph);

}  // namespace stochmatch
