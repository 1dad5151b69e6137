#include "stochmatch/poisson.hpp"

#include <cmath>

namespace stochmatch {

double poisson_cdf(int k, double lambda) {
  if (k < 0) return 0.0;
  if (lambda <= 0.0) return 1.0;
  double term = 1.0;
  double sum = 1.0;
  for (int l = 1; l <= k; ++l) {
    term *= lambda / l;
    sum += term;
  }
  return std::exp(-lambda) * sum;
}

double poisson_tail(int k, double lambda) {
  if (k <= 0) return 1.0;
  if (lambda <= 0.0) return 0.0;
  if (k == 1) return -std::expm1(-lambda);
  if (lambda > 0.5 * k) return 1.0 - poisson_cdf(k - 1, lambda);
  // Direct tail series: e^{-lambda} sum_{l>=k} lambda^l / l!.
  double term = std::exp(-lambda);
  for (int l = 1; l <= k; ++l) term *= lambda / l;
  double sum = 0.0;
  for (int l = k; l < k + 200; ++l) {
    sum += term;
    term *= lambda / (l + 1);
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

double poisson_capacity(int m, double lambda_s) {
  double total = 0.0;
  for (int k = 1; k <= m; ++k) total += poisson_tail(k, lambda_s);
  return total;
}

}  // namespace stochmatch
