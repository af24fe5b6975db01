#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kemeny/chain.hpp"
#include "kemeny/ctmc.hpp"
#include "kemeny/diffusion.hpp"
#include "kemeny/exec.hpp"
#include "kemeny/rng.hpp"

namespace kemeny {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::optional<double> target_exact;
  /// (mean - exact) / std_error; +-inf when std_error is 0 and mean != exact.
  std::optional<double> z_score;
};

/// Sample i is drawn from stream first_stream + (i mod streams), the samples
/// of one stream in index order. Per-sample values are reduced in index
/// order, so results depend on (seed, streams) but never on the thread count.
struct McOptions {
  std::uint64_t seed = 42;
  std::uint64_t streams = 16;
  std::uint64_t first_stream = 0;
  Exec exec = Exec::Parallel;
};

McEstimate summarize(std::span<const double> samples, std::optional<double> exact = {});

/// Inverse-CDF categorical draw for a uniform u in (0, 1).
std::size_t sample_stationary(std::span<const double> pi, double u);
/// Bisection on the stationary CDF to 1e-12.
double sample_stationary(const DiffusionAnalysis& a, double u);

/// Mean of D_Z from x with Z ~ pi, against kemeny_function's K(x).
McEstimate estimate_kemeny_dtmc(const TransitionMatrix& p, std::size_t x, std::uint64_t n_samples,
                                const McOptions& opts = {});

/// Mean of T_Z from x with Z ~ pi in real time, against kemeny_function_ct.
McEstimate estimate_kemeny_ctmc(const GeneratorMatrix& q, std::size_t x, std::uint64_t n_samples,
                                const McOptions& opts = {});

/// Start law and stopping rule for the occupation check. Unset fields mean
/// X_0 ~ pi and S = D_Z with Z ~ pi, which satisfies the lemma's hypothesis
/// (X_S ~ X_0 in law); fixing them gives controls that need not.
struct OccupationSetup {
  std::optional<std::size_t> start;
  std::optional<std::size_t> target;
};

/// Per state y, the estimate of E[N_S(y) - pi_y S] against 0.
std::vector<McEstimate> verify_occupation_lemma_dtmc(const TransitionMatrix& p,
                                                     std::uint64_t n_samples,
                                                     const McOptions& opts = {},
                                                     OccupationSetup setup = {});

struct EulerOptions {
  /// Defaults: h = 1e-4 (right - left)^2 (width 1 on unbounded intervals)
  /// and band 2 sqrt(h).
  std::optional<double> step;
  std::optional<double> band;
  double time_cap = 1e6;
};

/// Euler-Maruyama estimate of E^x[T_z], absorbed when |X - z| <= band or when
/// a step crosses z. Mirror reflection at reflecting endpoints; entrance
/// endpoints are floored 1e-12 of the width inside. The exact comparison
/// value comes from expected_hitting.
McEstimate estimate_hitting_diffusion(const DiffusionAnalysis& a, double x, double z,
                                      std::uint64_t n_samples, const McOptions& opts = {},
                                      const EulerOptions& euler = {});

}  // namespace kemeny
