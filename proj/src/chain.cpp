#include "kemeny/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kemeny/error.hpp"

namespace kemeny {

namespace {

constexpr std::size_t kMaxStates = 2000;
constexpr double kRowSumSlack = 1e-9;

/// (I - P) with row and column `target` removed.
Matrix restricted_system(const Matrix& p, std::size_t target) {
  const std::size_t n = p.rows();
  Matrix a(n - 1, n - 1);
  for (std::size_t i = 0, r = 0; i < n; ++i) {
    if (i == target) continue;
    for (std::size_t j = 0, c = 0; j < n; ++j) {
      if (j == target) continue;
      a(r, c) = (i == j ? 1.0 : 0.0) - p(i, j);
      ++c;
    }
    ++r;
  }
  return a;
}

std::vector<double> embed(const std::vector<double>& reduced, std::size_t target) {
  std::vector<double> full(reduced.size() + 1, 0.0);
  for (std::size_t i = 0, r = 0; i < full.size(); ++i)
    if (i != target) full[i] = reduced[r++];
  return full;
}

Matrix embed(const Matrix& reduced, std::size_t target) {
  const std::size_t n = reduced.rows() + 1;
  Matrix full(n, n);
  for (std::size_t i = 0, r = 0; i < n; ++i) {
    if (i == target) continue;
    for (std::size_t j = 0, c = 0; j < n; ++j) {
      if (j == target) continue;
      full(i, j) = reduced(r, c++);
    }
    ++r;
  }
  return full;
}

void check_target(const TransitionMatrix& p, std::size_t target) {
  if (target >= p.size())
    throw Error(ErrorCode::InvalidArgument, "target state " + std::to_string(target) +
                                                " out of range for " + std::to_string(p.size()) +
                                                " states");
}

double occupation_residual(const Matrix& g, const Matrix& dual_g, std::span<const double> pi) {
  double worst = 0.0;
  for (std::size_t x = 0; x < g.rows(); ++x)
    for (std::size_t y = 0; y < g.cols(); ++y)
      worst = std::max(worst, std::abs(pi[x] * g(x, y) - pi[y] * dual_g(y, x)));
  return worst;
}

void reach(const Matrix& m, std::size_t from, bool reverse, std::vector<char>& seen) {
  std::vector<std::size_t> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < m.rows(); ++v) {
      const double w = reverse ? m(v, u) : m(u, v);
      if (v != u && w > 0.0 && !seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
}

}  // namespace

bool strongly_connected(const Matrix& m) {
  if (m.rows() == 0) return false;
  for (bool reverse : {false, true}) {
    std::vector<char> seen(m.rows(), 0);
    reach(m, 0, reverse, seen);
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) return false;
  }
  return true;
}

TransitionMatrix validate_stochastic(const Matrix& raw) {
  if (!raw.square())
    throw Error(ErrorCode::NotSquare, std::to_string(raw.rows()) + "x" +
                                          std::to_string(raw.cols()) + " matrix");
  const std::size_t n = raw.rows();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "at least two states are required");
  if (n > kMaxStates)
    throw Error(ErrorCode::InvalidArgument, "at most " + std::to_string(kMaxStates) +
                                                " states are supported");

  Matrix p = raw;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = p(i, j);
      if (!std::isfinite(v))
        throw Error(ErrorCode::InvalidArgument, "non-finite entry in row " + std::to_string(i));
      if (v < 0.0)
        throw Error(ErrorCode::NegativeEntry,
                    "entry (" + std::to_string(i) + "," + std::to_string(j) + ") is negative");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumSlack)
      throw Error(ErrorCode::RowSumViolation,
                  "row " + std::to_string(i) + " sums to " + std::to_string(sum));
    if (sum != 1.0)
      for (double& v : p.row(i)) v /= sum;
  }
  if (!strongly_connected(p)) throw Error(ErrorCode::NotIrreducible, "chain is reducible");
  return TransitionMatrix(std::move(p));
}

StationaryDistribution stationary_distribution(const TransitionMatrix& p) {
  const std::size_t n = p.size();
  // pi (P - I) = 0 transposed, with the last equation swapped for sum(pi) = 1.
  Matrix a(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = p(j, i) - (i == j ? 1.0 : 0.0);
  for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  std::vector<double> b(n, 0.0);
  b[n - 1] = 1.0;
  return {LuDecomposition(std::move(a)).solve(b)};
}

TransitionMatrix dual_chain(const TransitionMatrix& p, const StationaryDistribution& pi) {
  const std::size_t n = p.size();
  Matrix d(n, n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) d(x, y) = p(y, x) * pi.pi[y] / pi.pi[x];
  return validate_stochastic(d);
}

HittingTimeTable mean_entry_times(const TransitionMatrix& p, std::size_t target) {
  check_target(p, target);
  const LuDecomposition lu(restricted_system(p.matrix(), target));
  const std::vector<double> ones(p.size() - 1, 1.0);
  return {target, embed(lu.solve(ones), target), {}};
}

HittingTimeTable entry_time_second_moments(const TransitionMatrix& p, std::size_t target,
                                           HittingTimeTable m1) {
  check_target(p, target);
  const std::size_t n = p.size();
  const auto pm1 = p.matrix() * std::span<const double>(m1.mean);
  std::vector<double> rhs;
  rhs.reserve(n - 1);
  for (std::size_t x = 0; x < n; ++x)
    if (x != target) rhs.push_back(1.0 + 2.0 * pm1[x]);
  const LuDecomposition lu(restricted_system(p.matrix(), target));
  m1.second_moment = embed(lu.solve(rhs), target);
  return m1;
}

OccupationMatrix occupation_matrix(const TransitionMatrix& p, std::size_t target) {
  check_target(p, target);
  const LuDecomposition lu(restricted_system(p.matrix(), target));
  return {target, embed(lu.inverse(), target)};
}

double check_occupation_duality(const TransitionMatrix& p, const StationaryDistribution& pi,
                                std::size_t target) {
  const auto dual = dual_chain(p, pi);
  return occupation_residual(occupation_matrix(p, target).g, occupation_matrix(dual, target).g,
                             pi.pi);
}

double khasminskii_ratio(const HittingTimeTable& moments) {
  const double c = *std::max_element(moments.mean.begin(), moments.mean.end());
  const double m2 =
      *std::max_element(moments.second_moment.begin(), moments.second_moment.end());
  if (c == 0.0) return 0.0;
  return m2 / (2.0 * c * c);
}

double kemeny_constant_trace(const TransitionMatrix& p, const StationaryDistribution& pi) {
  const std::size_t n = p.size();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = (i == j ? 1.0 : 0.0) - p(i, j) + pi.pi[j];
  const Matrix z = LuDecomposition(std::move(a)).inverse();
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += z(i, i);
  return trace - 1.0;
}

KemenyReport kemeny_function(const TransitionMatrix& p, Exec exec, KemenyOptions options) {
  const std::size_t n = p.size();
  const auto pi = stationary_distribution(p);
  const auto dual = dual_chain(p, pi);

  // Column z holds E^x[D_z] (resp. the dual chain's) for every x.
  Matrix mean(n, n);
  Matrix dual_mean(n, n);
  std::vector<double> occupation(n, 0.0);
  const std::vector<double> ones(n - 1, 1.0);

  for_each_index(n, exec, [&](std::size_t z) {
    const LuDecomposition lu(restricted_system(p.matrix(), z));
    const LuDecomposition dual_lu(restricted_system(dual.matrix(), z));
    const auto m = embed(lu.solve(ones), z);
    const auto dm = embed(dual_lu.solve(ones), z);
    for (std::size_t x = 0; x < n; ++x) {
      mean(x, z) = m[x];
      dual_mean(x, z) = dm[x];
    }
    if (options.occupation_check)
      occupation[z] = occupation_residual(embed(lu.inverse(), z), embed(dual_lu.inverse(), z),
                                          pi.pi);
  });

  KemenyReport report;
  report.k_values.assign(n, 0.0);
  std::vector<double> dual_k(n, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t z = 0; z < n; ++z) {
      report.k_values[x] += pi.pi[z] * mean(x, z);
      dual_k[x] += pi.pi[z] * dual_mean(x, z);
    }

  double dual_kappa = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    report.kappa += pi.pi[x] * report.k_values[x];
    dual_kappa += pi.pi[x] * dual_k[x];
  }
  const auto [lo, hi] = std::minmax_element(report.k_values.begin(), report.k_values.end());
  report.spread = *hi - *lo;

  double dual_identity = 0.0;
  for (double k : report.k_values) dual_identity = std::max(dual_identity, std::abs(k - dual_kappa));

  // Return times: E^z[T_z] = 1 + sum_y P(z, y) E^y[D_z].
  std::vector<double> return_time(n, 1.0);
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t y = 0; y < n; ++y) return_time[z] += p(z, y) * mean(y, z);
  double return_identity = 0.0;
  double kac = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    double kt = 0.0;
    for (std::size_t z = 0; z < n; ++z) kt += pi.pi[z] * (x == z ? return_time[z] : mean(x, z));
    return_identity = std::max(return_identity, std::abs(kt - 1.0 - report.k_values[x]));
    kac = std::max(kac, std::abs(return_time[x] * pi.pi[x] - 1.0));
  }

  report.residuals["dual_identity"] = dual_identity;
  report.residuals["dual_kappa"] = std::abs(report.kappa - dual_kappa);
  report.residuals["trace_identity"] = std::abs(report.kappa - kemeny_constant_trace(p, pi));
  report.residuals["return_time_identity"] = return_identity;
  report.residuals["kac_identity"] = kac;
  report.residuals["hunter_margin"] = report.kappa - 0.5 * static_cast<double>(n - 1);
  if (options.occupation_check)
    report.residuals["occupation_duality"] =
        *std::max_element(occupation.begin(), occupation.end());
  return report;
}

}  // namespace kemeny
