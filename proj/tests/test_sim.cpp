#include <doctest.h>

#include <cmath>

#include "kemeny/error.hpp"
#include "kemeny/sim.hpp"

using namespace kemeny;

namespace {

const auto kTwoState = validate_stochastic(Matrix{{0.7, 0.3}, {0.2, 0.8}});
const auto kHalf = validate_stochastic(Matrix{{0.5, 0.5}, {0.5, 0.5}});
const auto kCycle = validate_stochastic(Matrix{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});

DiffusionAnalysis bessel() {
  return build_analysis({parse_expression("1/x"), parse_expression("1"), 0.0, 1.0,
                         Boundary::Entrance, Boundary::Reflecting, 0.5});
}

}  // namespace

TEST_CASE("sample_stationary") {
  const double pi[] = {0.4, 0.6};
  CHECK(sample_stationary(pi, 0.3) == 0);
  CHECK(sample_stationary(pi, 0.95) == 1);
  CHECK(sample_stationary(pi, 0.4) == 1);
  const auto a = bessel();
  CHECK(std::abs(sample_stationary(a, 0.125) - 0.5) < 1e-10);
  CHECK(std::abs(sample_stationary(a, 0.001) - 0.1) < 1e-10);
}

TEST_CASE("summarize") {
  const double v[] = {1.0, 2.0, 3.0, 4.0};
  const auto e = summarize(v, 2.5);
  CHECK(e.mean == 2.5);
  CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3 / 4)));
  CHECK(*e.z_score == 0.0);
  const double c[] = {1.0, 1.0};
  CHECK(std::isinf(*summarize(c, 0.0).z_score));
  CHECK_FALSE(summarize(c).z_score.has_value());
}

TEST_CASE("dtmc kemeny estimates") {
  const auto two = estimate_kemeny_dtmc(kTwoState, 0, 100000);
  CHECK(*two.target_exact == doctest::Approx(2.0));
  CHECK(std::abs(*two.z_score) <= 3.0);
  const auto cyc = estimate_kemeny_dtmc(kCycle, 0, 10000);
  CHECK(std::abs(*cyc.z_score) <= 3.0);
  // A single run whose target equals the start contributes 0.
  McOptions o;
  for (o.seed = 0;; ++o.seed) {
    RngStream r(o.seed, 0);
    if (sample_stationary(stationary_distribution(kCycle).pi, r.uniform()) == 1) break;
  }
  CHECK(estimate_kemeny_dtmc(kCycle, 1, 1, o).mean == 0.0);
}

TEST_CASE("ctmc kemeny estimates") {
  const auto q = validate_generator(Matrix{{-1, 1}, {2, -2}});
  const auto e = estimate_kemeny_ctmc(q, 0, 100000);
  CHECK(*e.target_exact == doctest::Approx(1.0 / 3));
  CHECK(std::abs(*e.z_score) <= 3.0);
  const auto c = validate_generator(Matrix{{-1, 1, 0}, {0, -1, 1}, {1, 0, -1}});
  CHECK(std::abs(*estimate_kemeny_ctmc(c, 1, 10000).z_score) <= 3.0);
}

TEST_CASE("occupation lemma") {
  for (const auto* p : {&kHalf, &kCycle, &kTwoState}) {
    for (const auto& e : verify_occupation_lemma_dtmc(*p, 100000)) CHECK(std::abs(*e.z_score) <= 4.0);
  }
  // Start at state 1, stop at D_3: X_S = 3 is not distributed like X_0.
  const auto bad = verify_occupation_lemma_dtmc(kCycle, 1000, {}, {0, 2});
  CHECK(bad[1].mean == doctest::Approx(1.0 / 3));
  CHECK(std::abs(*bad[1].z_score) > 4.0);
}

TEST_CASE("reproducibility and thread independence") {
  McOptions serial;
  serial.exec = Exec::Serial;
  const auto a = estimate_kemeny_dtmc(kTwoState, 1, 20000);
  const auto b = estimate_kemeny_dtmc(kTwoState, 1, 20000, serial);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  const auto oa = verify_occupation_lemma_dtmc(kCycle, 5000);
  const auto ob = verify_occupation_lemma_dtmc(kCycle, 5000, serial);
  for (std::size_t y = 0; y < 3; ++y) CHECK(oa[y].mean == ob[y].mean);

  McOptions other;
  other.first_stream = 1000;
  CHECK(estimate_kemeny_dtmc(kTwoState, 1, 20000, other).mean != a.mean);
}

TEST_CASE("standard error shrinks like 1/sqrt(n)") {
  const double e1 = estimate_kemeny_dtmc(kTwoState, 0, 20000).std_error;
  const double e4 = estimate_kemeny_dtmc(kTwoState, 0, 80000).std_error;
  CHECK(e1 / e4 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("diffusion hitting estimate") {
  const auto a = bessel();
  McOptions o;
  EulerOptions e;
  e.step = 1e-4;
  e.band = 2e-2;
  CHECK(estimate_hitting_diffusion(a, 0.51, 0.5, 100, o, e).mean == 0.0);
  CHECK_THROWS_AS(estimate_hitting_diffusion(a, 1.0, 0.5, 10, o, {0.02, 0.1}), Error);

  // Halving h and the band moves the estimate toward 5/12.
  double prev_err = 1.0;
  for (double h : {4e-4, 1e-4, 2.5e-5}) {
    e.step = h;
    e.band = 2.0 * std::sqrt(h);
    const auto r = estimate_hitting_diffusion(a, 1.0, 0.5, 2000, o, e);
    CHECK(*r.target_exact == doctest::Approx(5.0 / 12).epsilon(1e-8));
    const double err = std::abs(r.mean - 5.0 / 12);
    CHECK(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("trajectories stay inside the interval") {
  // Reflected Brownian motion on [0, 1] started at the mirror: E^0[T_b] = b^2.
  // Leaking through 0 would inflate the time; the band pulls it to 0.99^2.
  const auto a = build_analysis({parse_expression("0"), parse_expression("1"), 0.0, 1.0,
                                 Boundary::Reflecting, Boundary::Reflecting, 0.5});
  EulerOptions e;
  e.step = 1e-4;
  e.band = 1e-2;
  const auto r = estimate_hitting_diffusion(a, 0.0, 1.0, 1000, {}, e);
  CHECK(*r.target_exact == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.mean > 0.99 * 0.99 - 4 * r.std_error);
  CHECK(r.mean < 1.0 + 4 * r.std_error);
}
