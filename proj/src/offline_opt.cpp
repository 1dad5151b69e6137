#include "stochmatch/offline_opt.hpp"

#include <algorithm>
#include <limits>

namespace stochmatch {

RealizedGraph realized_graph(const Instance& instance, const ArrivalSequence& arrivals) {
  RealizedGraph graph;
  graph.arrivals = arrivals;
  graph.offline_count = instance.offline_count;
  for (int a = 0; a < static_cast<int>(arrivals.size()); ++a) {
    for (const auto& edge : instance.types[arrivals[a].type].edges) {
      graph.edges.push_back({a, edge.offline, edge.weight});
    }
  }
  return graph;
}

namespace {

// Min-cost assignment of every row to a distinct column; rows <= cols.
// Returns assignment[row] = column.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost, int rows,
                           int cols) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<int> p(cols + 1, 0), way(cols + 1, 0);
  for (int i = 1; i <= rows; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<bool> used(cols + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(rows, -1);
  for (int j = 1; j <= cols; ++j) {
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

}  // namespace

OfflineMatching max_weight_matching(const RealizedGraph& graph) {
  OfflineMatching result;
  const int left = static_cast<int>(graph.arrivals.size());
  const int right = graph.offline_count;
  if (left == 0 || right == 0 || graph.edges.empty()) return result;

  std::vector<std::vector<double>> weight(left, std::vector<double>(right, 0.0));
  for (const auto& edge : graph.edges) {
    weight[edge.arrival][edge.offline] =
        std::max(weight[edge.arrival][edge.offline], edge.weight);
  }

  const bool transpose = left > right;
  const int rows = transpose ? right : left;
  const int cols = transpose ? left : right;
  std::vector<std::vector<double>> cost(rows, std::vector<double>(cols, 0.0));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      cost[r][c] = transpose ? -weight[c][r] : -weight[r][c];
    }
  }
  const auto assignment = hungarian(cost, rows, cols);
  for (int r = 0; r < rows; ++r) {
    const int c = assignment[r];
    if (c < 0) continue;
    const int a = transpose ? c : r;
    const int j = transpose ? r : c;
    if (weight[a][j] > 0.0) {
      result.pairs.emplace_back(a, j);
      result.value += weight[a][j];
    }
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

}  // namespace stochmatch
