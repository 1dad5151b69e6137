#pragma once

#include <algorithm>
#include <cmath>

#include "stochmatch/instance.hpp"

namespace stochmatch::testing {

// Direct term-by-term evaluation, independent of the library's summation.
inline double direct_cdf(int k, double lambda) {
  double term = 1.0;
  double sum = 1.0;
  for (int l = 1; l <= k; ++l) {
    term *= lambda / l;
    sum += term;
  }
  return std::exp(-lambda) * sum;
}

inline double direct_capacity(int m, double lambda) {
  double total = 0.0;
  for (int k = 1; k <= m; ++k) total += 1.0 - direct_cdf(k - 1, lambda);
  return total;
}

// Largest lhs - rhs over every S subset of I and every T with |T| <= level.
inline double brute_force_violation(const Instance& instance, const FractionalMatching& x, int level) {
  const int n = instance.type_count();
  const int m = instance.offline_count;
  double worst = -1e300;
  for (int t_mask = 1; t_mask < (1 << m); ++t_mask) {
    const int size = __builtin_popcount(t_mask);
    if (size > level) continue;
    for (int s_mask = 1; s_mask < (1 << n); ++s_mask) {
      double lhs = 0.0;
      double rate = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!(s_mask >> i & 1)) continue;
        rate += instance.types[i].rate;
        for (int j = 0; j < m; ++j) {
          if (t_mask >> j & 1) lhs += x(i, j);
        }
      }
      worst = std::max(worst, lhs - direct_capacity(size, rate));
    }
  }
  return worst;
}

}  // namespace stochmatch::testing
