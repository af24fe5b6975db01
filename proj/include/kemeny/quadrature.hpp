#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace kemeny {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 40;
};

namespace detail {

[[noreturn]] void quadrature_failure(double a, double b, const char* why);

template <typename F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth, int max_depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  if (!std::isfinite(flm) || !std::isfinite(frm)) quadrature_failure(a, b, "non-finite integrand");
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // Below this the error estimate is rounding noise in the local sum.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (b - a) / 12.0 *
                       (std::abs(fa) + 4.0 * std::abs(flm) + 2.0 * std::abs(fm) +
                        4.0 * std::abs(frm) + std::abs(fb));
  if (std::abs(delta) <= std::max(15.0 * tol, noise)) return left + right + delta / 15.0;
  if (!(a < lm && lm < m && m < rm && rm < b)) return left + right;
  if (depth >= max_depth) quadrature_failure(a, b, "recursion depth exhausted");
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

/// Adaptive composite Simpson on [a, b] to absolute tolerance `abs_tol`,
/// floored at the rounding level of the local sums. Throws
/// Error(QuadratureFailure) if the depth cap is reached before the local
/// error estimate falls under tolerance. Returns 0 for a == b and the
/// negated integral for a > b.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, QuadratureOptions opts = {}) {
  if (a == b) return 0.0;
  if (a > b) return -adaptive_simpson(f, b, a, opts);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
    detail::quadrature_failure(a, b, "non-finite integrand");
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, opts.abs_tol, 0, opts.max_depth);
}

/// Integrates over [a, b] with mandatory splits at `breaks` (points outside
/// (a, b) are ignored). The tolerance is shared among pieces by length.
template <typename F>
double integrate_piecewise(F&& f, double a, double b, std::span<const double> breaks,
                           QuadratureOptions opts = {}) {
  if (a == b) return 0.0;
  if (a > b) return -integrate_piecewise(f, b, a, breaks, opts);
  std::vector<double> pts{a};
  for (double x : breaks)
    if (x > a && x < b) pts.push_back(x);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    QuadratureOptions piece = opts;
    piece.abs_tol = opts.abs_tol * (pts[i + 1] - pts[i]) / (b - a);
    total += adaptive_simpson(f, pts[i], pts[i + 1], piece);
  }
  return total;
}

}  // namespace kemeny
