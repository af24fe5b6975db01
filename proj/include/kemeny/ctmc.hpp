#pragma once

#include <cstddef>
#include <optional>

#include "kemeny/chain.hpp"

namespace kemeny {

/// Conservative rate matrix of an irreducible finite continuous-time chain.
class GeneratorMatrix {
 public:
  std::size_t size() const noexcept { return q_.rows(); }
  const Matrix& matrix() const noexcept { return q_; }
  double operator()(std::size_t x, std::size_t y) const noexcept { return q_(x, y); }
  /// max_x |q(x, x)|
  double max_exit_rate() const noexcept;

 private:
  explicit GeneratorMatrix(Matrix q) : q_(std::move(q)) {}
  friend GeneratorMatrix validate_generator(const Matrix& raw);

  Matrix q_;
};

/// Same layout as the discrete report, in units of real time.
using CtKemenyReport = KemenyReport;

GeneratorMatrix validate_generator(const Matrix& raw);

StationaryDistribution stationary_ct(const GeneratorMatrix& q);

/// dual(x, y) = q(y, x) * pi[y] / pi[x]
GeneratorMatrix dual_generator(const GeneratorMatrix& q, const StationaryDistribution& pi);

/// max |pi_x q(x, y) - pi_y dual(y, x)|, i.e. diag(pi) Q = dual^T diag(pi).
double generator_duality_residual(const GeneratorMatrix& q, const GeneratorMatrix& dual,
                                  const StationaryDistribution& pi);

HittingTimeTable mean_hitting_times_ct(const GeneratorMatrix& q, std::size_t target);

double default_uniformization_rate(const GeneratorMatrix& q);

/// Rebuilds every E^x[T_z] as E^x[D_z] / rate under P = I + Q / rate and
/// returns the largest discrepancy against the direct solves, including the
/// Kemeny values K_ct(x) against K_dtmc(x) / rate.
double uniformization_crosscheck(const GeneratorMatrix& q, std::optional<double> rate = {},
                                 Exec exec = Exec::Parallel);

/// Residuals: dual_kappa (|kappa - dual kappa|), dual_identity, uniformization.
CtKemenyReport kemeny_function_ct(const GeneratorMatrix& q, Exec exec = Exec::Parallel);

}  // namespace kemeny
