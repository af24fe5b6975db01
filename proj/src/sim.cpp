#include "kemeny/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kemeny/error.hpp"

namespace kemeny {

namespace {

constexpr std::uint64_t kStepCap = 1'000'000'000;

void check_options(std::uint64_t n_samples, const McOptions& opts) {
  if (n_samples == 0) throw Error(ErrorCode::InvalidArgument, "n_samples must be positive");
  if (opts.streams == 0) throw Error(ErrorCode::InvalidArgument, "streams must be positive");
}

// values[i] = draw(stream, i) with the fixed sample -> stream assignment.
template <typename Draw>
std::vector<double> run_samples(std::uint64_t n, const McOptions& opts, Draw&& draw) {
  std::vector<double> values(n);
  const std::uint64_t j_count = std::min(opts.streams, n);
  for_each_index(j_count, opts.exec, [&](std::size_t j) {
    RngStream rng(opts.seed, opts.first_stream + j);
    for (std::uint64_t i = j; i < n; i += j_count) values[i] = draw(rng);
  });
  return values;
}

std::vector<double> cumulative(std::span<const double> w) {
  std::vector<double> c(w.size());
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) c[k] = s += w[k];
  return c;
}

std::size_t categorical(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u * cdf.back());
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

std::vector<std::vector<double>> row_cdfs(const Matrix& m) {
  std::vector<std::vector<double>> out(m.rows());
  for (std::size_t x = 0; x < m.rows(); ++x) out[x] = cumulative(m.row(x));
  return out;
}

[[noreturn]] void runaway(const char* what) {
  throw Error(ErrorCode::RunawayTrajectory, what);
}

}  // namespace

McEstimate summarize(std::span<const double> samples, std::optional<double> exact) {
  McEstimate e;
  e.n_samples = samples.size();
  if (samples.empty()) return e;
  double sum = 0.0;
  for (double v : samples) sum += v;
  e.mean = sum / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - e.mean) * (v - e.mean);
    const double n = static_cast<double>(samples.size());
    e.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  if (exact) {
    e.target_exact = exact;
    const double diff = e.mean - *exact;
    if (e.std_error > 0.0) e.z_score = diff / e.std_error;
    else if (diff == 0.0) e.z_score = 0.0;
    else e.z_score = std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  return e;
}

std::size_t sample_stationary(std::span<const double> pi, double u) {
  if (pi.empty()) throw Error(ErrorCode::InvalidArgument, "empty distribution");
  return categorical(cumulative(pi), u);
}

double sample_stationary(const DiffusionAnalysis& a, double u) {
  double lo = a.lower();
  double hi = a.upper();
  while (hi - lo > 1e-12 * std::max(1.0, std::abs(lo) + std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (a.pi_cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

McEstimate estimate_kemeny_dtmc(const TransitionMatrix& p, std::size_t x, std::uint64_t n_samples,
                                const McOptions& opts) {
  check_options(n_samples, opts);
  if (x >= p.size()) throw Error(ErrorCode::InvalidArgument, "start state out of range");
  const auto exact = kemeny_function(p, opts.exec).k_values[x];
  const auto pi_cdf = cumulative(stationary_distribution(p).pi);
  const auto rows = row_cdfs(p.matrix());
  const auto values = run_samples(n_samples, opts, [&](RngStream& rng) {
    const std::size_t z = categorical(pi_cdf, rng.uniform());
    std::size_t s = x;
    std::uint64_t steps = 0;
    while (s != z) {
      s = categorical(rows[s], rng.uniform());
      if (++steps > kStepCap) runaway("walk exceeded 1e9 steps");
    }
    return static_cast<double>(steps);
  });
  return summarize(values, exact);
}

McEstimate estimate_kemeny_ctmc(const GeneratorMatrix& q, std::size_t x, std::uint64_t n_samples,
                                const McOptions& opts) {
  check_options(n_samples, opts);
  if (x >= q.size()) throw Error(ErrorCode::InvalidArgument, "start state out of range");
  const auto exact = kemeny_function_ct(q, opts.exec).k_values[x];
  const auto pi_cdf = cumulative(stationary_ct(q).pi);
  const std::size_t n = q.size();
  Matrix jumps(n, n);
  std::vector<double> rate(n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t y = 0; y < n; ++y)
      if (y != s) jumps(s, y) = q(s, y);
    rate[s] = -q(s, s);
  }
  const auto rows = row_cdfs(jumps);
  const auto values = run_samples(n_samples, opts, [&](RngStream& rng) {
    const std::size_t z = categorical(pi_cdf, rng.uniform());
    std::size_t s = x;
    double t = 0.0;
    std::uint64_t steps = 0;
    while (s != z) {
      t += rng.exponential() / rate[s];
      s = categorical(rows[s], rng.uniform());
      if (++steps > kStepCap) runaway("jump chain exceeded 1e9 jumps");
    }
    return t;
  });
  return summarize(values, exact);
}

std::vector<McEstimate> verify_occupation_lemma_dtmc(const TransitionMatrix& p,
                                                     std::uint64_t n_samples,
                                                     const McOptions& opts,
                                                     OccupationSetup setup) {
  check_options(n_samples, opts);
  const std::size_t n = p.size();
  if ((setup.start && *setup.start >= n) || (setup.target && *setup.target >= n))
    throw Error(ErrorCode::InvalidArgument, "state out of range");
  const auto pi = stationary_distribution(p).pi;
  const auto pi_cdf = cumulative(pi);
  const auto rows = row_cdfs(p.matrix());

  // Integer moments per stream; sums of integers are exact, so the pooled
  // result does not depend on how streams are combined.
  struct Moments {
    std::vector<std::uint64_t> sn, sn2, sns;
    std::uint64_t ss = 0, ss2 = 0;
  };
  const std::uint64_t j_count = std::min(opts.streams, n_samples);
  std::vector<Moments> parts(j_count);
  for_each_index(j_count, opts.exec, [&](std::size_t j) {
    Moments& m = parts[j];
    m.sn.assign(n, 0);
    m.sn2.assign(n, 0);
    m.sns.assign(n, 0);
    std::vector<std::uint64_t> visits(n);
    RngStream rng(opts.seed, opts.first_stream + j);
    for (std::uint64_t i = j; i < n_samples; i += j_count) {
      std::size_t s = setup.start ? *setup.start : categorical(pi_cdf, rng.uniform());
      const std::size_t z = setup.target ? *setup.target : categorical(pi_cdf, rng.uniform());
      std::fill(visits.begin(), visits.end(), 0);
      std::uint64_t steps = 0;
      while (s != z) {
        ++visits[s];
        s = categorical(rows[s], rng.uniform());
        if (++steps > kStepCap) runaway("walk exceeded 1e9 steps");
      }
      for (std::size_t y = 0; y < n; ++y) {
        m.sn[y] += visits[y];
        m.sn2[y] += visits[y] * visits[y];
        m.sns[y] += visits[y] * steps;
      }
      m.ss += steps;
      m.ss2 += steps * steps;
    }
  });
  Moments total{std::vector<std::uint64_t>(n), std::vector<std::uint64_t>(n),
                std::vector<std::uint64_t>(n)};
  for (const auto& m : parts) {
    for (std::size_t y = 0; y < n; ++y) {
      total.sn[y] += m.sn[y];
      total.sn2[y] += m.sn2[y];
      total.sns[y] += m.sns[y];
    }
    total.ss += m.ss;
    total.ss2 += m.ss2;
  }

  // d = N(y) - pi_y S per sample.
  const double count = static_cast<double>(n_samples);
  std::vector<McEstimate> out(n);
  for (std::size_t y = 0; y < n; ++y) {
    const double py = pi[y];
    const double sd = static_cast<double>(total.sn[y]) - py * static_cast<double>(total.ss);
    const double sd2 = static_cast<double>(total.sn2[y]) -
                       2.0 * py * static_cast<double>(total.sns[y]) +
                       py * py * static_cast<double>(total.ss2);
    McEstimate& e = out[y];
    e.n_samples = n_samples;
    e.mean = sd / count;
    if (n_samples > 1) {
      const double var = std::max(0.0, (sd2 - count * e.mean * e.mean) / (count - 1.0));
      e.std_error = std::sqrt(var / count);
    }
    e.target_exact = 0.0;
    if (e.std_error > 0.0) e.z_score = e.mean / e.std_error;
    else if (e.mean == 0.0) e.z_score = 0.0;
    else e.z_score = std::copysign(std::numeric_limits<double>::infinity(), e.mean);
  }
  return out;
}

McEstimate estimate_hitting_diffusion(const DiffusionAnalysis& a, double x, double z,
                                      std::uint64_t n_samples, const McOptions& opts,
                                      const EulerOptions& euler) {
  check_options(n_samples, opts);
  const auto& spec = a.spec();
  const bool finite = std::isfinite(spec.left) && std::isfinite(spec.right);
  const double width = finite ? spec.right - spec.left : 1.0;
  const double h = euler.step.value_or(1e-4 * width * width);
  const double band = euler.band.value_or(2.0 * std::sqrt(h));
  if (!(h > 0.0) || !(band > 0.0))
    throw Error(ErrorCode::InvalidArgument, "step and band must be positive");
  if (finite && h > width * width / 100.0)
    throw Error(ErrorCode::StepTooLarge, "step exceeds (right - left)^2 / 100");
  if (!(x >= spec.left && x <= spec.right && z >= spec.left && z <= spec.right))
    throw Error(ErrorCode::InvalidArgument, "x and z must lie in the interval");

  const double exact = expected_hitting(a, x, z);
  const bool reflect_lo = spec.left_boundary == Boundary::Reflecting;
  const bool reflect_hi = spec.right_boundary == Boundary::Reflecting;
  const double floor_lo = spec.left + 1e-12 * width;
  const double floor_hi = spec.right - 1e-12 * width;
  const double sqrt_h = std::sqrt(h);
  const double max_steps = euler.time_cap / h;

  auto confine = [&](double y) {
    for (int k = 0; k < 8; ++k) {
      if (reflect_hi && y > spec.right) y = 2.0 * spec.right - y;
      else if (reflect_lo && y < spec.left) y = 2.0 * spec.left - y;
      else break;
    }
    if (std::isfinite(spec.left)) y = std::max(y, reflect_lo ? spec.left : floor_lo);
    if (std::isfinite(spec.right)) y = std::min(y, reflect_hi ? spec.right : floor_hi);
    return y;
  };

  const auto values = run_samples(n_samples, opts, [&](RngStream& rng) {
    double y = x;
    if (std::abs(y - z) <= band) return 0.0;
    std::uint64_t steps = 0;
    for (;;) {
      const double next = confine(y + spec.drift(y) * h + spec.sigma(y) * sqrt_h * rng.normal());
      ++steps;
      if (std::abs(next - z) <= band || (y - z) * (next - z) < 0.0) break;
      y = next;
      if (static_cast<double>(steps) > max_steps) runaway("trajectory exceeded the time cap");
    }
    return static_cast<double>(steps) * h;
  });
  return summarize(values, exact);
}

}  // namespace kemeny
