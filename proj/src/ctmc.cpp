#include "kemeny/ctmc.hpp"

#include <algorithm>
#include <cmath>

#include "kemeny/error.hpp"

namespace kemeny {

namespace {

constexpr double kRowSumTolerance = 1e-12;

/// -Q with row and column `target` removed.
Matrix restricted_negated(const Matrix& q, std::size_t target) {
  const std::size_t n = q.rows();
  Matrix a(n - 1, n - 1);
  for (std::size_t i = 0, r = 0; i < n; ++i) {
    if (i == target) continue;
    for (std::size_t j = 0, c = 0; j < n; ++j) {
      if (j == target) continue;
      a(r, c++) = -q(i, j);
    }
    ++r;
  }
  return a;
}

std::vector<double> solve_hitting(const Matrix& q, std::size_t target) {
  const LuDecomposition lu(restricted_negated(q, target));
  const auto reduced = lu.solve(std::vector<double>(q.rows() - 1, 1.0));
  std::vector<double> full(q.rows(), 0.0);
  for (std::size_t i = 0, r = 0; i < q.rows(); ++i)
    if (i != target) full[i] = reduced[r++];
  return full;
}

/// Mean hitting times for every target, column z = E^.[T_z].
Matrix all_hitting_times(const Matrix& q, Exec exec) {
  const std::size_t n = q.rows();
  Matrix mean(n, n);
  for_each_index(n, exec, [&](std::size_t z) {
    const auto col = solve_hitting(q, z);
    for (std::size_t x = 0; x < n; ++x) mean(x, z) = col[x];
  });
  return mean;
}

std::vector<double> kemeny_values(const Matrix& mean, std::span<const double> pi) {
  std::vector<double> k(mean.rows(), 0.0);
  for (std::size_t x = 0; x < mean.rows(); ++x)
    for (std::size_t z = 0; z < mean.cols(); ++z) k[x] += pi[z] * mean(x, z);
  return k;
}

double pi_average(std::span<const double> values, std::span<const double> pi) {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += pi[i] * values[i];
  return s;
}

}  // namespace

double GeneratorMatrix::max_exit_rate() const noexcept {
  double r = 0.0;
  for (std::size_t i = 0; i < size(); ++i) r = std::max(r, std::abs(q_(i, i)));
  return r;
}

GeneratorMatrix validate_generator(const Matrix& raw) {
  if (!raw.square())
    throw Error(ErrorCode::NotSquare, std::to_string(raw.rows()) + "x" +
                                          std::to_string(raw.cols()) + " generator");
  const std::size_t n = raw.rows();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "at least two states are required");
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = raw(i, j);
      if (!std::isfinite(v))
        throw Error(ErrorCode::InvalidArgument, "non-finite rate in row " + std::to_string(i));
      if (i != j && v < 0.0)
        throw Error(ErrorCode::NegativeOffDiagonal,
                    "rate (" + std::to_string(i) + "," + std::to_string(j) + ") is negative");
      sum += v;
      scale = std::max(scale, std::abs(v));
    }
    if (std::abs(sum) > kRowSumTolerance * std::max(1.0, scale))
      throw Error(ErrorCode::RowSumViolation,
                  "row " + std::to_string(i) + " sums to " + std::to_string(sum));
  }
  if (!strongly_connected(raw)) throw Error(ErrorCode::NotIrreducible, "generator is reducible");
  return GeneratorMatrix(raw);
}

StationaryDistribution stationary_ct(const GeneratorMatrix& q) {
  const std::size_t n = q.size();
  // Rescale by a power of two so that Q and cQ (c = 2^k) give bitwise-equal pi.
  int exponent = 0;
  std::frexp(q.max_exit_rate(), &exponent);
  Matrix a(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = std::ldexp(q(j, i), -exponent);
  for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  std::vector<double> b(n, 0.0);
  b[n - 1] = 1.0;
  return {LuDecomposition(std::move(a)).solve(b)};
}

GeneratorMatrix dual_generator(const GeneratorMatrix& q, const StationaryDistribution& pi) {
  const std::size_t n = q.size();
  Matrix d(n, n);
  for (std::size_t x = 0; x < n; ++x) {
    double off = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      d(x, y) = q(y, x) * pi.pi[y] / pi.pi[x];
      off += d(x, y);
    }
    // Exact conservation; q(x, x) and -off agree to rounding when pi is stationary.
    d(x, x) = -off;
  }
  return validate_generator(d);
}

double generator_duality_residual(const GeneratorMatrix& q, const GeneratorMatrix& dual,
                                  const StationaryDistribution& pi) {
  double worst = 0.0;
  for (std::size_t x = 0; x < q.size(); ++x)
    for (std::size_t y = 0; y < q.size(); ++y)
      worst = std::max(worst, std::abs(pi.pi[x] * q(x, y) - pi.pi[y] * dual(y, x)));
  return worst;
}

HittingTimeTable mean_hitting_times_ct(const GeneratorMatrix& q, std::size_t target) {
  if (target >= q.size())
    throw Error(ErrorCode::InvalidArgument, "target state " + std::to_string(target) +
                                                " out of range");
  return {target, solve_hitting(q.matrix(), target), {}};
}

double default_uniformization_rate(const GeneratorMatrix& q) { return 1.1 * q.max_exit_rate(); }

double uniformization_crosscheck(const GeneratorMatrix& q, std::optional<double> rate, Exec exec) {
  const double lambda = rate.value_or(default_uniformization_rate(q));
  if (!(lambda > 0.0) || lambda < q.max_exit_rate())
    throw Error(ErrorCode::RateTooSmall, "uniformization rate " + std::to_string(lambda) +
                                             " is below the largest exit rate " +
                                             std::to_string(q.max_exit_rate()));
  const std::size_t n = q.size();
  Matrix p = Matrix::identity(n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) p(x, y) += q(x, y) / lambda;
  const auto chain = validate_stochastic(p);

  const Matrix direct = all_hitting_times(q.matrix(), exec);
  Matrix steps(n, n);
  for_each_index(n, exec, [&](std::size_t z) {
    const auto col = mean_entry_times(chain, z).mean;
    for (std::size_t x = 0; x < n; ++x) steps(x, z) = col[x];
  });

  double worst = 0.0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t z = 0; z < n; ++z)
      worst = std::max(worst, std::abs(steps(x, z) / lambda - direct(x, z)));

  const auto pi = stationary_ct(q);
  const auto k_ct = kemeny_values(direct, pi.pi);
  const auto k_dt = kemeny_values(steps, stationary_distribution(chain).pi);
  for (std::size_t x = 0; x < n; ++x) worst = std::max(worst, std::abs(k_dt[x] / lambda - k_ct[x]));
  return worst;
}

CtKemenyReport kemeny_function_ct(const GeneratorMatrix& q, Exec exec) {
  const auto pi = stationary_ct(q);
  const auto dual = dual_generator(q, pi);

  CtKemenyReport report;
  report.k_values = kemeny_values(all_hitting_times(q.matrix(), exec), pi.pi);
  const auto dual_k = kemeny_values(all_hitting_times(dual.matrix(), exec), pi.pi);
  report.kappa = pi_average(report.k_values, pi.pi);
  const double dual_kappa = pi_average(dual_k, pi.pi);
  const auto [lo, hi] = std::minmax_element(report.k_values.begin(), report.k_values.end());
  report.spread = *hi - *lo;

  double dual_identity = 0.0;
  for (double k : report.k_values) dual_identity = std::max(dual_identity, std::abs(k - dual_kappa));
  report.residuals["dual_kappa"] = std::abs(report.kappa - dual_kappa);
  report.residuals["dual_identity"] = dual_identity;
  report.residuals["generator_duality"] = generator_duality_residual(q, dual, pi);
  report.residuals["uniformization"] = uniformization_crosscheck(q, std::nullopt, exec);
  return report;
}

}  // namespace kemeny
