#pragma once

// Reference computations that share no code path with the library solvers.

#include <algorithm>
#include <cmath>
#include <vector>

#include "kemeny/linalg.hpp"

namespace kemeny::testing {

/// Mean entry times into `target` by fixed-point iteration m <- 1 + P m on the
/// non-target states (converges since the restricted chain is substochastic).
inline std::vector<double> iterate_entry_times(const Matrix& p, std::size_t target,
                                               double tol = 1e-14, int max_iter = 10'000'000) {
  const std::size_t n = p.rows();
  std::vector<double> m(n, 0.0), next(n, 0.0);
  for (int it = 0; it < max_iter; ++it) {
    double change = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      if (x == target) continue;
      double s = 1.0;
      for (std::size_t y = 0; y < n; ++y)
        if (y != target) s += p(x, y) * m[y];
      next[x] = s;
      change = std::max(change, std::abs(s - m[x]) / std::max(1.0, std::abs(s)));
    }
    m.swap(next);
    if (change < tol) break;
  }
  return m;
}

/// Stationary distribution by power iteration on the lazy chain (I + P) / 2.
inline std::vector<double> power_stationary(const Matrix& p, double tol = 1e-15,
                                            int max_iter = 10'000'000) {
  const std::size_t n = p.rows();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  for (int it = 0; it < max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) next[y] += 0.5 * pi[x] * ((x == y) + p(x, y));
    double change = 0.0;
    for (std::size_t x = 0; x < n; ++x) change = std::max(change, std::abs(next[x] - pi[x]));
    pi.swap(next);
    if (change < tol) break;
  }
  return pi;
}

}  // namespace kemeny::testing
