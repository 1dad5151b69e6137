#include "stochmatch/instance.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace stochmatch {

using nlohmann::json;

double Instance::total_rate() const {
  double total = 0.0;
  for (const auto& type : types) total += type.rate;
  return total;
}

double Instance::weight(int i, int j) const {
  for (const auto& edge : types[i].edges) {
    if (edge.offline == j) return edge.weight;
  }
  return 0.0;
}

FractionalMatching::FractionalMatching(int type_count, int offline_count)
    : types_(type_count),
      offline_(offline_count),
      values_(static_cast<std::size_t>(type_count) *
                  static_cast<std::size_t>(offline_count),
              0.0) {}

double FractionalMatching::rho(const Instance& instance, int i, int j) const {
  return (*this)(i, j) / instance.types[i].rate;
}

double FractionalMatching::load(int j) const {
  double total = 0.0;
  for (int i = 0; i < types_; ++i) total += (*this)(i, j);
  return total;
}

double FractionalMatching::type_mass(int i) const {
  double total = 0.0;
  for (int j = 0; j < offline_; ++j) total += (*this)(i, j);
  return total;
}

std::string FractionalMatching::check_matching_polytope(
    const Instance& instance, double tol) const {
  std::ostringstream out;
  for (int i = 0; i < types_; ++i) {
    for (int j = 0; j < offline_; ++j) {
      const double v = (*this)(i, j);
      if (v < -tol) {
        out << "x(" << i << "," << j << ") is negative";
        return out.str();
      }
      if (v > tol && instance.weight(i, j) <= 0.0) {
        out << "x(" << i << "," << j << ") is positive on a non-edge";
        return out.str();
      }
    }
    if (type_mass(i) > instance.types[i].rate + tol) {
      out << "type " << i << " exceeds its arrival rate";
      return out.str();
    }
  }
  for (int j = 0; j < offline_; ++j) {
    if (load(j) > 1.0 + tol) {
      out << "offline vertex " << j << " has load above 1";
      return out.str();
    }
  }
  return {};
}

std::optional<std::string> validate(const Instance& instance) {
  if (instance.offline_count <= 0) return "offline_count must be positive";
  std::vector<double> vertex_weight(instance.offline_count, -1.0);
  for (int i = 0; i < instance.type_count(); ++i) {
    const auto& type = instance.types[i];
    if (!(type.rate > 0.0) || !std::isfinite(type.rate)) {
      return "rate must be positive";
    }
    std::vector<bool> seen(instance.offline_count, false);
    for (const auto& edge : type.edges) {
      if (edge.offline < 0 || edge.offline >= instance.offline_count) {
        return "neighbor index out of range";
      }
      if (seen[edge.offline]) return "duplicate neighbor";
      seen[edge.offline] = true;
      if (!(edge.weight > 0.0) || !std::isfinite(edge.weight)) {
        return "weight must be positive";
      }
      switch (instance.weight_class) {
        case WeightClass::kUnweighted:
          if (edge.weight != 1.0) return "unweighted requires w_ij = 1";
          break;
        case WeightClass::kVertexWeighted: {
          double& w = vertex_weight[edge.offline];
          if (w < 0.0) {
            w = edge.weight;
          } else if (w != edge.weight) {
            return "vertex-weighted requires w_ij = w_j";
          }
          break;
        }
        case WeightClass::kEdgeWeighted:
          break;
      }
    }
  }
  return std::nullopt;
}

Instance gen_random(const RandomInstanceParams& params, std::uint64_t seed) {
  if (params.n_types <= 0 || params.n_offline <= 0) {
    throw std::invalid_argument("gen_random: sizes must be positive");
  }
  if (!(params.edge_prob > 0.0 && params.edge_prob <= 1.0)) {
    throw std::invalid_argument("gen_random: edge_prob must lie in (0, 1]");
  }
  if (!(params.rate_min > 0.0 && params.rate_max >= params.rate_min) ||
      !(params.weight_min > 0.0 && params.weight_max >= params.weight_min)) {
    throw std::invalid_argument("gen_random: ranges must be positive");
  }
  constexpr int kMaxRetries = 1000;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto in_range = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  Instance instance;
  instance.offline_count = params.n_offline;
  instance.weight_class = params.weight_class;
  instance.free_disposal = params.free_disposal;

  std::vector<double> vertex_weight(params.n_offline, 1.0);
  if (params.weight_class == WeightClass::kVertexWeighted) {
    for (auto& w : vertex_weight) w = in_range(params.weight_min, params.weight_max);
  }

  for (int i = 0; i < params.n_types; ++i) {
    OnlineType type;
    type.rate = in_range(params.rate_min, params.rate_max);
    int attempt = 0;
    while (type.edges.empty()) {
      if (attempt++ == kMaxRetries) {
        throw std::invalid_argument(
            "gen_random: edge_prob too small to give every type a neighbor");
      }
      for (int j = 0; j < params.n_offline; ++j) {
        if (unit(rng) < params.edge_prob) type.edges.push_back({j, 1.0});
      }
    }
    for (auto& edge : type.edges) {
      switch (params.weight_class) {
        case WeightClass::kUnweighted:
          edge.weight = 1.0;
          break;
        case WeightClass::kVertexWeighted:
          edge.weight = vertex_weight[edge.offline];
          break;
        case WeightClass::kEdgeWeighted:
          edge.weight = in_range(params.weight_min, params.weight_max);
          break;
      }
    }
    instance.types.push_back(std::move(type));
  }
  return instance;
}

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double result = 1.0;
  for (int r = 1; r <= k; ++r) result = result * (n - k + r) / r;
  return result;
}

}  // namespace

Instance gen_hardness_edge_weighted(int n, double x, double eps,
                                    double core_threshold) {
  if (n < 3) {
    throw std::invalid_argument("hardness instance needs n >= 3 (triples are empty)");
  }
  if (!(x > 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument("hardness instance needs x > 0 and eps > 0");
  }
  const double m = 0.5 * core_threshold * n;
  const double full_rate = n - 2.0 * m - n * eps;
  if (!(full_rate > 0.0)) {
    throw std::invalid_argument("hardness instance: n - 2m - n*eps must be positive");
  }

  Instance instance;
  instance.offline_count = n;
  instance.weight_class = WeightClass::kEdgeWeighted;
  instance.free_disposal = false;

  for (int a = 0; a < n; ++a) {
    instance.types.push_back({eps, {{a, x / eps}}});
  }
  const double pair_rate = m / binomial(n, 2);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      instance.types.push_back({pair_rate, {{a, 1.0}, {b, 1.0}}});
    }
  }
  const double triple_rate = m / binomial(n, 3);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        instance.types.push_back({triple_rate, {{a, 1.0}, {b, 1.0}, {c, 1.0}}});
      }
    }
  }
  OnlineType everything{full_rate, {}};
  for (int a = 0; a < n; ++a) everything.edges.push_back({a, 1.0});
  instance.types.push_back(std::move(everything));
  return instance;
}

Instance gen_jaillet_lu() {
  const double ln2 = std::log(2.0);
  Instance instance;
  instance.offline_count = 2;
  instance.weight_class = WeightClass::kUnweighted;
  instance.types = {
      {1.0 - ln2, {{0, 1.0}}},
      {2.0 * ln2, {{0, 1.0}, {1, 1.0}}},
      {1.0 - ln2, {{1, 1.0}}},
  };
  return instance;
}

std::string to_string(WeightClass weight_class) {
  switch (weight_class) {
    case WeightClass::kUnweighted:
      return "unweighted";
    case WeightClass::kVertexWeighted:
      return "vertex";
    case WeightClass::kEdgeWeighted:
      return "edge";
  }
  return "unweighted";
}

WeightClass weight_class_from_string(const std::string& name) {
  if (name == "unweighted") return WeightClass::kUnweighted;
  if (name == "vertex") return WeightClass::kVertexWeighted;
  if (name == "edge") return WeightClass::kEdgeWeighted;
  throw std::invalid_argument("unknown weight_class: " + name);
}

std::string instance_to_json(const Instance& instance) {
  json doc;
  doc["offline_count"] = instance.offline_count;
  doc["weight_class"] = to_string(instance.weight_class);
  doc["free_disposal"] = instance.free_disposal;
  json types = json::array();
  for (const auto& type : instance.types) {
    json edges = json::array();
    for (const auto& edge : type.edges) edges.push_back({{"j", edge.offline}, {"w", edge.weight}});
    types.push_back({{"rate", type.rate}, {"edges", std::move(edges)}});
  }
  doc["types"] = std::move(types);
  return doc.dump(2);
}

Instance instance_from_json(const std::string& text) {
  Instance instance;
  try {
    const json doc = json::parse(text);
    instance.offline_count = doc.at("offline_count").get<int>();
    instance.weight_class =
        weight_class_from_string(doc.at("weight_class").get<std::string>());
    instance.free_disposal = doc.value("free_disposal", false);
    for (const auto& type_doc : doc.at("types")) {
      OnlineType type;
      type.rate = type_doc.at("rate").get<double>();
      for (const auto& edge_doc : type_doc.at("edges")) {
        type.edges.push_back(
            {edge_doc.at("j").get<int>(), edge_doc.value("w", 1.0)});
      }
      instance.types.push_back(std::move(type));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed instance JSON: ") + e.what());
  }
  if (auto violation = validate(instance)) {
    throw std::invalid_argument("invalid instance: " + *violation);
  }
  return instance;
}

void save_instance(const Instance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << instance_to_json(instance) << '\n';
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("instance not found: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return instance_from_json(buffer.str());
}

}  // namespace stochmatch
