#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kemeny/exec.hpp"
#include "kemeny/expr.hpp"
#include "kemeny/quadrature.hpp"

namespace kemeny {

enum class Boundary { Reflecting, Entrance };

/// Coefficients of L f = (sigma^2 / 2) f'' + drift f' on (left, right).
/// Endpoints may be infinite; reflecting endpoints must be finite.
struct DiffusionSpec {
  Expr drift = Expr::number(0.0);
  Expr sigma = Expr::number(1.0);
  double left = 0.0;
  double right = 1.0;
  Boundary left_boundary = Boundary::Reflecting;
  Boundary right_boundary = Boundary::Reflecting;
  /// Additive normalization point of the scale function.
  double anchor = 0.5;
};

/// 1001 Chebyshev points strictly inside the interval (mapped rationally
/// when an endpoint is infinite).
std::vector<double> validation_grid(const DiffusionSpec& spec, std::size_t count = 1001);

/// Throws on structural problems or sigma <= 0 on the validation grid.
/// Returns warnings (sigma vanishing or undefined at a finite endpoint).
std::vector<std::string> validate_spec(const DiffusionSpec& spec);

/// Same coefficients restricted to [-R, R] (intersected with the interval)
/// with reflection at any cut endpoint.
DiffusionSpec truncated(const DiffusionSpec& spec, double radius);

/// Scale function, speed density and stationary law of a positive recurrent
/// diffusion. With s'(u) = exp(-int_anchor^u 2 drift / sigma^2) and
/// m'(u) = 2 / (sigma^2 s'), the total speed mass is M = int m', the
/// stationary density is m' / M, and the scale function is premultiplied by
/// M so that the Green function pairs with pi directly.
///
/// Immutable after construction and safe to share across threads.
class DiffusionAnalysis {
 public:
  const DiffusionSpec& spec() const noexcept { return spec_; }
  double mass() const noexcept { return mass_; }
  /// Computational domain: finite endpoints pulled in by 1e-12 of the width;
  /// infinite ones cut where the remaining stationary mass is negligible.
  double lower() const noexcept;
  double upper() const noexcept;

  double scale(double x) const;
  /// s'(x), the raw (anchor-normalized) scale density.
  double scale_density(double x) const;
  double pi_density(double x) const;
  double pi_cdf(double x) const;

  std::size_t table_size() const noexcept;

 private:
  struct Table;
  DiffusionAnalysis(DiffusionSpec spec, std::shared_ptr<const Table> table, double mass)
      : spec_(std::move(spec)), table_(std::move(table)), mass_(mass) {}
  friend DiffusionAnalysis build_analysis(const DiffusionSpec& spec);

  DiffusionSpec spec_;
  std::shared_ptr<const Table> table_;
  double mass_;
};

/// Errors: NotPositiveRecurrent, SigmaVanishes, QuadratureFailure.
DiffusionAnalysis build_analysis(const DiffusionSpec& spec);

/// v_z(x, y): expected local time at y (w.r.t. pi) before hitting z.
double green_function(const DiffusionAnalysis& a, double z, double x, double y);

/// E^x[T_z] = int v_z(x, y) pi(dy), split at x and z.
double expected_hitting(const DiffusionAnalysis& a, double x, double z,
                        QuadratureOptions opts = {});

/// |S(x) - S(y)|
double h_metric(const DiffusionAnalysis& a, double x, double y);

struct GammaResult {
  double value = 0.0;
  /// The integral overflowed its guard; value is +inf.
  bool divergent = false;
};

/// gamma = 2 M int s'(y) F(y) (1 - F(y)) dy, the double pi-integral of h.
/// Unbounded intervals need a truncation radius (TruncationRequired otherwise).
GammaResult gamma(const DiffusionAnalysis& a, std::optional<double> truncation = {},
                  QuadratureOptions opts = {});

struct DiffusionKemenyReport {
  std::vector<double> grid;
  std::vector<double> k_values;
  double kappa = 0.0;
  double gamma = 0.0;
  double spread = 0.0;
  double residual_gamma = 0.0;
};

/// n Chebyshev points strictly inside the interval, ascending.
std::vector<double> chebyshev_grid(const DiffusionSpec& spec, std::size_t n = 21);

/// K at each grid point by nested quadrature; kappa from pi-weights of the
/// piecewise-linear interpolant of the profile.
DiffusionKemenyReport kemeny_profile(const DiffusionAnalysis& a, const std::vector<double>& grid,
                                     Exec exec = Exec::Parallel, QuadratureOptions opts = {});

}  // namespace kemeny
