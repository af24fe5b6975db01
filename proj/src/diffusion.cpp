#include "kemeny/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kemeny/error.hpp"

namespace kemeny {

namespace {

constexpr double kEndpointCutoff = 1e-12;
constexpr double kPhiTol = 1e-11;
constexpr double kTableTol = 1e-10;
constexpr double kMaxExtent = 1e6;
constexpr double kTailMass = 1e-16;
constexpr double kExponentGuard = 650.0;
constexpr double kGammaGuard = 1e300;

struct Node {
  double x = 0.0;
  double phi = 0.0;   // log s'
  double dphi = 0.0;  // -2 drift / sigma^2
  double raw = 0.0;   // int_anchor^x s'
  double sp = 1.0;    // s'
  double cum = 0.0;   // int_anchor^x m'
  double mp = 0.0;    // m' = 2 / (sigma^2 s')
};

struct Coefficients {
  const DiffusionSpec& spec;

  double sigma2(double u) const {
    const double s = spec.sigma(u);
    return s * s;
  }
  double dphi(double u) const { return -2.0 * spec.drift(u) / sigma2(u); }
  double speed(double u, double phi) const { return 2.0 * std::exp(-phi) / sigma2(u); }
};

double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * d1;
}

Node make_node(const Coefficients& c, double x, double phi, double raw, double cum) {
  if (std::abs(phi) > kExponentGuard)
    throw Error(ErrorCode::QuadratureFailure, "scale density overflows near x=" + std::to_string(x));
  Node n;
  n.x = x;
  n.phi = phi;
  n.dphi = c.dphi(x);
  n.raw = raw;
  n.sp = std::exp(phi);
  n.cum = cum;
  n.mp = c.speed(x, phi);
  return n;
}

/// Integrates phi, raw scale and speed mass from node `a` to `b`.
Node advance(const Coefficients& c, const Node& a, double b) {
  const double dphi_b = c.dphi(b);
  const double width = std::abs(b - a.x);
  const QuadratureOptions phi_opts{
      1e-15 * std::max(1.0, width * std::max(std::abs(a.dphi), std::abs(dphi_b))), 40};
  auto dphi = [&](double u) { return c.dphi(u); };
  auto phi_at = [&](double u) { return a.phi + adaptive_simpson(dphi, a.x, u, phi_opts); };

  const double phi_b = phi_at(b);
  const double sp_b = std::exp(phi_b);
  const double mp_b = c.speed(b, phi_b);
  const QuadratureOptions raw_opts{1e-14 * width * std::max(a.sp, sp_b), 40};
  const QuadratureOptions cum_opts{1e-14 * width * std::max(a.mp, mp_b), 40};
  const double raw = adaptive_simpson([&](double u) { return std::exp(phi_at(u)); }, a.x, b, raw_opts);
  const double cum = adaptive_simpson([&](double u) { return c.speed(u, phi_at(u)); }, a.x, b, cum_opts);
  return make_node(c, b, phi_b, a.raw + raw, a.cum + cum);
}

bool hermite_accepts(const Node& a, const Node& b, const Node& mid) {
  const double phi = hermite(a.x, b.x, a.phi, b.phi, a.dphi, b.dphi, mid.x);
  const double raw = hermite(a.x, b.x, a.raw, b.raw, a.sp, b.sp, mid.x);
  const double cum = hermite(a.x, b.x, a.cum, b.cum, a.mp, b.mp, mid.x);
  // Increments below the rounding floor of the accumulated value are accepted.
  auto floor = [](double u, double v) {
    return 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(u), std::abs(v));
  };
  return std::abs(phi - mid.phi) <= kPhiTol * (1.0 + std::abs(mid.phi)) &&
         std::abs(raw - mid.raw) <= kTableTol * std::abs(b.raw - a.raw) + floor(a.raw, b.raw) &&
         std::abs(cum - mid.cum) <= kTableTol * std::abs(b.cum - a.cum) + floor(a.cum, b.cum);
}

/// Walks from the anchor toward `limit` (possibly infinite), accepting a step
/// only when the cubic Hermite interpolant reproduces the integrated midpoint.
std::vector<Node> march(const Coefficients& c, const Node& start, double dir, double limit,
                        double initial_step) {
  std::vector<Node> nodes;
  Node cur = start;
  double step = initial_step;
  for (;;) {
    double b = cur.x + dir * step;
    bool last = false;
    if (std::isfinite(limit) && dir * (b - limit) >= 0.0) {
      b = limit;
      last = true;
    }
    const double m = 0.5 * (cur.x + b);
    bool ok = true;
    Node mid, end;
    try {
      mid = advance(c, cur, m);
      end = advance(c, mid, b);
      ok = hermite_accepts(cur, end, mid);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::QuadratureFailure) throw;
      ok = false;
    }
    if (!ok) {
      step = 0.5 * std::abs(b - cur.x);
      if (step <= 1e-14 * std::max(std::abs(cur.x), 1e-300))
        throw Error(ErrorCode::QuadratureFailure,
                    "cannot resolve the scale function near x=" + std::to_string(cur.x));
      continue;
    }
    const double prev_mp = cur.mp;
    nodes.push_back(mid);
    nodes.push_back(end);
    cur = end;
    if (last) break;
    if (!std::isfinite(limit)) {
      const double extent = std::abs(cur.x - start.x);
      if (cur.mp < prev_mp && cur.mp * (1.0 + extent) <= kTailMass * std::abs(cur.cum)) break;
      if (extent > kMaxExtent)
        throw Error(ErrorCode::NotPositiveRecurrent,
                    "speed measure has infinite mass toward " +
                        std::string(dir > 0 ? "+inf" : "-inf"));
    }
    step *= 1.6;
  }
  return nodes;
}

std::size_t segment_of(const std::vector<double>& xs, double x) {
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs.begin());
  if (i == 0) return 0;
  return std::min(i - 1, xs.size() - 2);
}

double chebyshev_node(std::size_t k, std::size_t n) {
  // Ascending nodes in (-1, 1).
  return -std::cos((2.0 * static_cast<double>(k) + 1.0) * std::numbers::pi /
                   (2.0 * static_cast<double>(n)));
}

double map_to_interval(const DiffusionSpec& spec, double t) {
  const bool lf = std::isfinite(spec.left);
  const bool rf = std::isfinite(spec.right);
  if (lf && rf) return 0.5 * (spec.left + spec.right) + 0.5 * (spec.right - spec.left) * t;
  if (lf) return spec.left + (1.0 + t) / (1.0 - t);
  if (rf) return spec.right - (1.0 - t) / (1.0 + t);
  return spec.anchor + t / (1.0 - t * t);
}

}  // namespace

struct DiffusionAnalysis::Table {
  std::vector<double> x, phi, dphi, raw, sp, cum, mp;
  double cum_lower = 0.0;

  double interp(const std::vector<double>& y, const std::vector<double>& d, double at) const {
    const std::size_t i = segment_of(x, at);
    return hermite(x[i], x[i + 1], y[i], y[i + 1], d[i], d[i + 1], at);
  }
  double clamp(double at) const { return std::clamp(at, x.front(), x.back()); }
};

std::vector<double> validation_grid(const DiffusionSpec& spec, std::size_t count) {
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) grid[k] = map_to_interval(spec, chebyshev_node(k, count));
  return grid;
}

std::vector<std::string> validate_spec(const DiffusionSpec& spec) {
  if (std::isnan(spec.left) || std::isnan(spec.right) || !(spec.left < spec.right))
    throw Error(ErrorCode::InvalidArgument, "interval must satisfy left < right");
  if (!std::isfinite(spec.anchor) || !(spec.left < spec.anchor && spec.anchor < spec.right))
    throw Error(ErrorCode::InvalidArgument, "anchor must lie strictly inside the interval");
  if (spec.left_boundary == Boundary::Reflecting && !std::isfinite(spec.left))
    throw Error(ErrorCode::InvalidArgument, "a reflecting left endpoint must be finite");
  if (spec.right_boundary == Boundary::Reflecting && !std::isfinite(spec.right))
    throw Error(ErrorCode::InvalidArgument, "a reflecting right endpoint must be finite");

  for (double x : validation_grid(spec)) {
    const double s = spec.sigma(x);
    if (!(s > 0.0))
      throw Error(ErrorCode::SigmaVanishes, "sigma(" + std::to_string(x) + ") = " +
                                                std::to_string(s) + " is not positive");
    spec.drift(x);
  }

  std::vector<std::string> warnings;
  for (double e : {spec.left, spec.right}) {
    if (!std::isfinite(e)) continue;
    try {
      if (!(spec.sigma(e) > 0.0))
        warnings.push_back("sigma vanishes at endpoint " + std::to_string(e));
    } catch (const DomainError&) {
      warnings.push_back("sigma is undefined at endpoint " + std::to_string(e));
    }
  }
  return warnings;
}

DiffusionSpec truncated(const DiffusionSpec& spec, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw Error(ErrorCode::InvalidArgument, "truncation radius must be positive and finite");
  DiffusionSpec t = spec;
  if (spec.left < -radius) {
    t.left = -radius;
    t.left_boundary = Boundary::Reflecting;
  }
  if (spec.right > radius) {
    t.right = radius;
    t.right_boundary = Boundary::Reflecting;
  }
  if (!(t.left < t.right))
    throw Error(ErrorCode::InvalidArgument, "truncation leaves an empty interval");
  if (!(t.left < t.anchor && t.anchor < t.right)) t.anchor = 0.5 * (t.left + t.right);
  return t;
}

DiffusionAnalysis build_analysis(const DiffusionSpec& spec) {
  validate_spec(spec);
  const Coefficients c{spec};

  const bool lf = std::isfinite(spec.left);
  const bool rf = std::isfinite(spec.right);
  const double width = (lf && rf) ? spec.right - spec.left
                                  : std::max(1.0, std::abs(spec.anchor - (lf ? spec.left : rf ? spec.right : 0.0)));
  const double lo = lf ? spec.left + kEndpointCutoff * width : -std::numeric_limits<double>::infinity();
  const double hi = rf ? spec.right - kEndpointCutoff * width : std::numeric_limits<double>::infinity();

  const Node start = make_node(c, spec.anchor, 0.0, 0.0, 0.0);
  const double left_step = lf ? (spec.anchor - lo) / 64.0 : 0.25;
  const double right_step = rf ? (hi - spec.anchor) / 64.0 : 0.25;
  auto left_nodes = march(c, start, -1.0, lo, left_step);
  auto right_nodes = march(c, start, +1.0, hi, right_step);

  auto table = std::make_shared<DiffusionAnalysis::Table>();
  auto push = [&](const Node& n) {
    table->x.push_back(n.x);
    table->phi.push_back(n.phi);
    table->dphi.push_back(n.dphi);
    table->raw.push_back(n.raw);
    table->sp.push_back(n.sp);
    table->cum.push_back(n.cum);
    table->mp.push_back(n.mp);
  };
  for (auto it = left_nodes.rbegin(); it != left_nodes.rend(); ++it) push(*it);
  push(start);
  for (const auto& n : right_nodes) push(n);

  table->cum_lower = table->cum.front();
  const double mass = table->cum.back() - table->cum.front();
  if (!std::isfinite(mass) || !(mass > 0.0))
    throw Error(ErrorCode::NotPositiveRecurrent, "speed measure mass is not finite");

  // A finite endpoint must not carry a non-integrable speed singularity: the
  // innermost 1e-6 of the interval may hold at most 1% of the mass.
  const double band = 1e-6 * width;
  if (lf) {
    const double near = table->interp(table->cum, table->mp, table->clamp(lo + band)) - table->cum.front();
    if (near > 1e-2 * mass)
      throw Error(ErrorCode::NotPositiveRecurrent, "speed mass diverges at the left endpoint");
  }
  if (rf) {
    const double near = table->cum.back() - table->interp(table->cum, table->mp, table->clamp(hi - band));
    if (near > 1e-2 * mass)
      throw Error(ErrorCode::NotPositiveRecurrent, "speed mass diverges at the right endpoint");
  }
  return DiffusionAnalysis(spec, std::move(table), mass);
}

double DiffusionAnalysis::lower() const noexcept { return table_->x.front(); }
double DiffusionAnalysis::upper() const noexcept { return table_->x.back(); }
std::size_t DiffusionAnalysis::table_size() const noexcept { return table_->x.size(); }

double DiffusionAnalysis::scale(double x) const {
  return mass_ * table_->interp(table_->raw, table_->sp, table_->clamp(x));
}

double DiffusionAnalysis::scale_density(double x) const {
  return std::exp(table_->interp(table_->phi, table_->dphi, table_->clamp(x)));
}

double DiffusionAnalysis::pi_density(double x) const {
  const double u = table_->clamp(x);
  const double phi = table_->interp(table_->phi, table_->dphi, u);
  return Coefficients{spec_}.speed(u, phi) / mass_;
}

double DiffusionAnalysis::pi_cdf(double x) const {
  if (x <= lower()) return 0.0;
  if (x >= upper()) return 1.0;
  return (table_->interp(table_->cum, table_->mp, x) - table_->cum_lower) / mass_;
}

double green_function(const DiffusionAnalysis& a, double z, double x, double y) {
  if (x >= z && y >= z) return a.scale(std::min(x, y)) - a.scale(z);
  if (x <= z && y <= z) return a.scale(z) - a.scale(std::max(x, y));
  return 0.0;
}

double expected_hitting(const DiffusionAnalysis& a, double x, double z, QuadratureOptions opts) {
  if (x == z) return 0.0;
  const double sx = a.scale(x);
  const double sz = a.scale(z);
  const double breaks[] = {x, z};
  if (x > z) {
    auto f = [&](double y) { return (std::min(sx, a.scale(y)) - sz) * a.pi_density(y); };
    return integrate_piecewise(f, z, a.upper(), breaks, opts);
  }
  auto f = [&](double y) { return (sz - std::max(sx, a.scale(y))) * a.pi_density(y); };
  return integrate_piecewise(f, a.lower(), z, breaks, opts);
}

double h_metric(const DiffusionAnalysis& a, double x, double y) {
  return std::abs(a.scale(x) - a.scale(y));
}

GammaResult gamma(const DiffusionAnalysis& a, std::optional<double> truncation,
                  QuadratureOptions opts) {
  const auto& spec = a.spec();
  if (truncation) return gamma(build_analysis(truncated(spec, *truncation)), std::nullopt, opts);
  if (!std::isfinite(spec.left) || !std::isfinite(spec.right))
    throw Error(ErrorCode::TruncationRequired,
                "gamma over an unbounded interval needs a truncation radius");
  const double m = a.mass();
  auto f = [&](double y) {
    const double F = a.pi_cdf(y);
    return 2.0 * m * a.scale_density(y) * F * (1.0 - F);
  };
  double value = 0.0;
  try {
    value = adaptive_simpson(f, a.lower(), a.upper(), opts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::QuadratureFailure) throw;
    if (f(a.lower()) < kGammaGuard && f(a.upper()) < kGammaGuard) throw;
    return {std::numeric_limits<double>::infinity(), true};
  }
  if (!(value < kGammaGuard)) return {std::numeric_limits<double>::infinity(), true};
  return {value, false};
}

std::vector<double> chebyshev_grid(const DiffusionSpec& spec, std::size_t n) {
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) grid[k] = map_to_interval(spec, chebyshev_node(k, n));
  return grid;
}

DiffusionKemenyReport kemeny_profile(const DiffusionAnalysis& a, const std::vector<double>& grid,
                                     Exec exec, QuadratureOptions opts) {
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty grid");
  const auto& spec = a.spec();
  // Reflecting endpoints are reachable, so K is defined there too.
  const bool lo_ok = spec.left_boundary == Boundary::Reflecting;
  const bool hi_ok = spec.right_boundary == Boundary::Reflecting;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double g = grid[i];
    if (!((g > spec.left || (lo_ok && g == spec.left)) &&
          (g < spec.right || (hi_ok && g == spec.right))))
      throw Error(ErrorCode::InvalidArgument, "grid points must lie in the state space");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "grid must be strictly increasing");
  }

  DiffusionKemenyReport r;
  r.grid = grid;
  r.gamma = gamma(a, std::nullopt, opts).value;
  r.k_values.assign(grid.size(), 0.0);
  for_each_index(grid.size(), exec, [&](std::size_t i) {
    const double x = grid[i];
    auto f = [&](double z) { return expected_hitting(a, x, z, opts) * a.pi_density(z); };
    const double breaks[] = {x};
    r.k_values[i] = integrate_piecewise(f, a.lower(), a.upper(), breaks, opts);
  });

  // Hat-function weights w_i = int l_i dpi, the end hats extended flat to the
  // boundary; exact for a constant profile.
  const std::size_t n = grid.size();
  std::vector<double> w(n, 0.0);
  auto pi = [&](double u) { return a.pi_density(u); };
  w.front() += adaptive_simpson(pi, a.lower(), grid.front(), opts);
  w.back() += adaptive_simpson(pi, grid.back(), a.upper(), opts);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double g0 = grid[i];
    const double g1 = grid[i + 1];
    const double h = g1 - g0;
    w[i] += adaptive_simpson([&](double u) { return (g1 - u) / h * a.pi_density(u); }, g0, g1, opts);
    w[i + 1] += adaptive_simpson([&](double u) { return (u - g0) / h * a.pi_density(u); }, g0, g1, opts);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r.kappa += w[i] * r.k_values[i];
    total += w[i];
  }
  r.kappa /= total;

  const auto [lo, hi] = std::minmax_element(r.k_values.begin(), r.k_values.end());
  r.spread = *hi - *lo;
  r.residual_gamma = std::abs(r.kappa - 0.5 * r.gamma);
  return r;
}

}  // namespace kemeny
