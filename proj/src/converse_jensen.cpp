#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stochmatch/lp_hierarchy.hpp"
#include "stochmatch/poisson.hpp"

namespace stochmatch {

double pair_mass(double lambda1, double lambda2) {
  return poisson_tail(1, lambda2) + poisson_tail(2, lambda2) -
         poisson_tail(1, std::min(lambda1, lambda2));
}

namespace {

constexpr double kNearOne = 1.0 - 1e-12;
constexpr double kBisectionTol = 1e-12;
constexpr double kRangeSlack = 1e-9;

double first_lambda_star(double x1) {
  if (x1 >= kNearOne) return kLambdaCap;
  return std::min(kLambdaCap, -std::log1p(-x1));
}

double second_lambda_star(double lambda1, double x2) {
  if (x2 <= 0.0) return 0.0;
  const double top = pair_mass(lambda1, kLambdaCap);
  if (x2 >= top) {
    if (x2 > top + kRangeSlack) {
      throw std::invalid_argument("lambda_star_solve: x2 outside the achievable range");
    }
    return kLambdaCap;
  }
  double lo = 0.0;
  double hi = kLambdaCap;
  while (hi - lo > kBisectionTol) {
    const double mid = 0.5 * (lo + hi);
    if (pair_mass(lambda1, mid) < x2) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

LambdaStar lambda_star_solve(double x1, double x2) {
  if (!(x1 >= 0.0 && x1 <= 1.0)) {
    throw std::invalid_argument("lambda_star_solve: x1 must lie in [0, 1]");
  }
  if (!(x2 >= 0.0) || x2 > x1) {
    throw std::invalid_argument("lambda_star_solve: need 0 <= x2 <= x1");
  }
  return lambda_star_solve_unordered(x1, x2);
}

LambdaStar lambda_star_solve_unordered(double x1, double x2) {
  if (!(x1 >= 0.0 && x1 <= 1.0) || !(x2 >= 0.0)) {
    throw std::invalid_argument("lambda_star_solve: inputs out of range");
  }
  LambdaStar result;
  result.first = first_lambda_star(x1);
  result.second = second_lambda_star(result.first, x2);
  return result;
}

double DrFamily::eval_split(double y, double w) const {
  const double num = a * y + b * w;
  const double den = std::max(0.0, a - 1.0) * y + std::max(0.0, b - 1.0) * w + 1.0;
  return num / den;
}

namespace {

template <typename Point>
void append_simpson(double from, double to, double dlambda, Point&& point,
                    std::vector<ProfileNode>& nodes) {
  const double length = to - from;
  if (!(length > 0.0)) return;
  int intervals = static_cast<int>(std::ceil(length / dlambda - 1e-9));
  intervals = std::max(2, intervals + (intervals % 2));
  const double h = length / intervals;
  for (int k = 0; k <= intervals; ++k) {
    const double lambda = (k == intervals) ? to : from + k * h;
    double weight = (k == 0 || k == intervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    ProfileNode node = point(lambda);
    node.weight = weight * h / 3.0;
    nodes.push_back(node);
  }
}

}  // namespace

std::vector<ProfileNode> second_level_profile(const LambdaStar& lambda_star,
                                              double dlambda) {
  if (!(dlambda > 0.0)) throw std::invalid_argument("dlambda must be positive");
  const double l1 = lambda_star.first;
  const double l2 = lambda_star.second;
  const double lo = std::min(l1, l2);
  const double hi = std::max(l1, l2);
  std::vector<ProfileNode> nodes;
  // (P0, P1): y = e^{-l}, z - y = l e^{-l}.
  append_simpson(0.0, lo, dlambda, [](double l) {
    const double p0 = std::exp(-l);
    return ProfileNode{p0, l * p0, 0.0};
  }, nodes);
  if (l1 <= l2) {
    // (0, P1)
    append_simpson(lo, hi, dlambda, [](double l) {
      return ProfileNode{0.0, (1.0 + l) * std::exp(-l), 0.0};
    }, nodes);
  } else {
    // (P0, P0)
    append_simpson(lo, hi, dlambda, [](double l) {
      return ProfileNode{std::exp(-l), 0.0, 0.0};
    }, nodes);
  }
  return nodes;
}

double integrate_profile(const std::vector<ProfileNode>& nodes, const DrFamily& f) {
  double total = 0.0;
  for (const auto& node : nodes) total += node.weight * f.eval_split(node.y, node.w);
  return total;
}

SecondLevelCheck check_second_level_cj(const Instance& instance,
                                       const FractionalMatching& x, int j1,
                                       int j2, const DrFamily& f, double dlambda) {
  if (f.a < f.b || !(f.b > 0.0)) {
    throw std::invalid_argument("check_second_level_cj: need A >= B > 0");
  }
  if (j1 == j2 || j1 < 0 || j2 < 0 || j1 >= instance.offline_count ||
      j2 >= instance.offline_count) {
    throw std::invalid_argument("check_second_level_cj: need distinct offline vertices");
  }
  SecondLevelCheck check;
  for (int i = 0; i < instance.type_count(); ++i) {
    const double rate = instance.types[i].rate;
    const double y = x(i, j1) / rate;
    const double w = x(i, j2) / rate;
    check.lhs += rate * f.eval_split(y, w);
  }
  const double x1 = std::min(1.0, x.load(j1));
  const double x2 = std::min(2.0 - x1, x.load(j2));
  const LambdaStar lambda_star = lambda_star_solve_unordered(x1, x2);
  check.rhs = integrate_profile(second_level_profile(lambda_star, dlambda), f);
  check.pass = check.lhs >= check.rhs - 1e-6;
  return check;
}

}  // namespace stochmatch
