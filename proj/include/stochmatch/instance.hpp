#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stochmatch {

enum class WeightClass { kUnweighted, kVertexWeighted, kEdgeWeighted };

struct Edge {
  int offline = 0;
  double weight = 1.0;
};

/// One online vertex type: Poisson arrival rate and its weighted neighbor list.
struct OnlineType {
  double rate = 0.0;
  std::vector<Edge> edges;
};

/// Bipartite type graph of an online stochastic matching problem.
///
/// Offline vertices are the indices 0..offline_count-1. Edge weights live on
/// the per-type neighbor lists. Treated as immutable once built.
struct Instance {
  std::vector<OnlineType> types;
  int offline_count = 0;
  WeightClass weight_class = WeightClass::kUnweighted;
  bool free_disposal = false;

  int type_count() const { return static_cast<int>(types.size()); }
  double total_rate() const;
  /// Weight of edge (i, j), or 0 when the edge is absent.
  double weight(int i, int j) const;
  /// Free disposal only matters for edge-weighted instances.
  bool disposes() const {
    return free_disposal && weight_class == WeightClass::kEdgeWeighted;
  }
};

/// Dense |I| x |J| fractional matching x_ij.
class FractionalMatching {
 public:
  FractionalMatching() = default;
  FractionalMatching(int type_count, int offline_count);

  int type_count() const { return types_; }
  int offline_count() const { return offline_; }

  double operator()(int i, int j) const { return values_[index(i, j)]; }
  double& operator()(int i, int j) { return values_[index(i, j)]; }

  /// rho_ij = x_ij / lambda_i.
  double rho(const Instance& instance, int i, int j) const;
  /// x_j = sum_i x_ij.
  double load(int j) const;
  /// sum_j x_ij.
  double type_mass(int i) const;

  /// Empty string when feasible for the matching polytope (online rate
  /// constraints and x_j <= 1) within tol, otherwise a description.
  std::string check_matching_polytope(const Instance& instance,
                                      double tol = 1e-9) const;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(offline_) +
           static_cast<std::size_t>(j);
  }

  int types_ = 0;
  int offline_ = 0;
  std::vector<double> values_;
};

/// Returns the first violated invariant, or nullopt when the instance is valid.
std::optional<std::string> validate(const Instance& instance);

struct RandomInstanceParams {
  int n_types = 3;
  int n_offline = 2;
  double edge_prob = 1.0;
  double rate_min = 0.2;
  double rate_max = 1.5;
  double weight_min = 1.0;
  double weight_max = 5.0;
  WeightClass weight_class = WeightClass::kUnweighted;
  bool free_disposal = false;
};

/// Random instance; a pure function of (params, seed).
Instance gen_random(const RandomInstanceParams& params, std::uint64_t seed);

/// Default for the 2.5-core threshold constant used by the hardness instance.
inline constexpr double kCoreThreshold = 0.81;

/// Explicit edge-weighted (no free disposal) hardness instance on n offline
/// vertices: singleton types of weight x/eps and rate eps, all pairs and all
/// triples with unit weight, and one type adjacent to everything. Rates sum to n.
Instance gen_hardness_edge_weighted(int n, double x, double eps,
                                    double core_threshold = kCoreThreshold);

/// Three types T, M, B over offline vertices t (index 0) and b (index 1).
Instance gen_jaillet_lu();

std::string to_string(WeightClass weight_class);
WeightClass weight_class_from_string(const std::string& name);

std::string instance_to_json(const Instance& instance);
/// Throws std::invalid_argument on malformed input or failed validation.
Instance instance_from_json(const std::string& text);

void save_instance(const Instance& instance, const std::string& path);
/// Throws std::runtime_error("instance not found: ...") for missing files.
Instance load_instance(const std::string& path);

}  // namespace stochmatch
