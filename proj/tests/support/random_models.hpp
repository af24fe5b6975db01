#pragma once

// Seeded generators of irreducible chains and generators for property tests.

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "kemeny/linalg.hpp"

namespace kemeny::testing {

enum class Sparsity { Dense, Sparse };

inline double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Nonnegative weights on a random Hamiltonian cycle (guarantees irreducibility)
/// plus extra edges: every pair in the dense regime, about two per row in the
/// sparse one.
inline Matrix random_weights(std::size_t n, Sparsity sparsity, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

  Matrix w(n, n);
  for (std::size_t k = 0; k < n; ++k) w(order[k], order[(k + 1) % n]) = 0.05 + unit(rng);
  const double extra = sparsity == Sparsity::Dense ? 1.0 : 2.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (unit(rng) < extra) w(i, j) += unit(rng);
  return w;
}

inline Matrix random_stochastic(std::size_t n, Sparsity sparsity, std::mt19937_64& rng) {
  Matrix p = random_weights(n, sparsity, rng);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : p.row(i)) s += v;
    for (double& v : p.row(i)) v /= s;
  }
  return p;
}

inline Matrix random_generator(std::size_t n, Sparsity sparsity, std::mt19937_64& rng) {
  Matrix q = random_weights(n, sparsity, rng);
  for (std::size_t i = 0; i < n; ++i) {
    q(i, i) = 0.0;
    double s = 0.0;
    for (double v : q.row(i)) s += v;
    q(i, i) = -s;
  }
  return q;
}

inline Matrix permuted(const Matrix& m, const std::vector<std::size_t>& perm) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(perm[i], perm[j]) = m(i, j);
  return out;
}

}  // namespace kemeny::testing
