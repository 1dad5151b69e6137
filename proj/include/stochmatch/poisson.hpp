#pragma once

namespace stochmatch {

/// P_k(lambda) = e^{-lambda} sum_{l=0}^{k} lambda^l / l!.
double poisson_cdf(int k, double lambda);

/// Pr[Poisson(lambda) >= k] = 1 - P_{k-1}(lambda), accurate for small lambda.
double poisson_tail(int k, double lambda);

/// Right-hand side of a level-m Poisson constraint:
/// sum_{k=1}^{m} (1 - P_{k-1}(lambda_s)), the expected min(N, m).
double poisson_capacity(int m, double lambda_s);

}  // namespace stochmatch
