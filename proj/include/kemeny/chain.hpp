#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "kemeny/exec.hpp"
#include "kemeny/linalg.hpp"

namespace kemeny {

/// Row-stochastic matrix of an irreducible finite chain. Only constructible
/// through validate_stochastic().
class TransitionMatrix {
 public:
  std::size_t size() const noexcept { return p_.rows(); }
  const Matrix& matrix() const noexcept { return p_; }
  double operator()(std::size_t x, std::size_t y) const noexcept { return p_(x, y); }

 private:
  explicit TransitionMatrix(Matrix p) : p_(std::move(p)) {}
  friend TransitionMatrix validate_stochastic(const Matrix& raw);

  Matrix p_;
};

struct StationaryDistribution {
  std::vector<double> pi;
};

/// Entry-time moments toward `target`. `second_moment` is empty until filled
/// by entry_time_second_moments().
struct HittingTimeTable {
  std::size_t target = 0;
  std::vector<double> mean;
  std::vector<double> second_moment;
};

/// g(x, y) = expected visits to y during {0, ..., D_target - 1} starting from x.
struct OccupationMatrix {
  std::size_t target = 0;
  Matrix g;
};

struct KemenyReport {
  std::vector<double> k_values;
  double kappa = 0.0;
  double spread = 0.0;
  std::map<std::string, double> residuals;
};

struct KemenyOptions {
  /// Also compute the occupation-duality residual for every target. Doubles
  /// the per-target cost (two extra inversions).
  bool occupation_check = true;
};

/// Rows within 1e-9 of unit sum are renormalized; anything worse is rejected.
TransitionMatrix validate_stochastic(const Matrix& raw);

/// True when the digraph {(i, j) : m(i, j) > 0, i != j} is strongly connected.
bool strongly_connected(const Matrix& m);

StationaryDistribution stationary_distribution(const TransitionMatrix& p);

/// Time-reversed chain: dual(x, y) = p(y, x) * pi[y] / pi[x].
TransitionMatrix dual_chain(const TransitionMatrix& p, const StationaryDistribution& pi);

HittingTimeTable mean_entry_times(const TransitionMatrix& p, std::size_t target);

/// Fills `second_moment` from the one-step recursion
/// m2(x) = sum_y p(x, y) (1 + 2 m1(y) + m2(y)).
HittingTimeTable entry_time_second_moments(const TransitionMatrix& p, std::size_t target,
                                           HittingTimeTable m1);

OccupationMatrix occupation_matrix(const TransitionMatrix& p, std::size_t target);

/// max_{x,y} |pi_x g(x, y) - pi_y dual_g(y, x)|.
double check_occupation_duality(const TransitionMatrix& p, const StationaryDistribution& pi,
                                std::size_t target);

/// max_x E^x[D_z^2] / (2 C^2) with C = max_x E^x[D_z]; the moment bound holds iff <= 1.
double khasminskii_ratio(const HittingTimeTable& moments);

/// tr((I - P + 1 pi)^{-1}) - 1, the fundamental-matrix form of the Kemeny constant.
double kemeny_constant_trace(const TransitionMatrix& p, const StationaryDistribution& pi);

/// K(x) = sum_z pi_z E^x[D_z] from n independent restricted solves, plus the
/// identity residuals: dual_identity, trace_identity, return_time_identity,
/// kac_identity, occupation_duality (optional) and hunter_margin
/// (kappa - (n-1)/2, signed).
///
/// Cost is O(n^4) overall; inputs are capped at 2000 states.
KemenyReport kemeny_function(const TransitionMatrix& p, Exec exec = Exec::Parallel,
                             KemenyOptions options = {});

}  // namespace kemeny
