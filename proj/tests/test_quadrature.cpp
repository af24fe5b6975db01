#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kemeny/error.hpp"
#include "kemeny/quadrature.hpp"

using namespace kemeny;

TEST_CASE("polynomials up to cubic are exact") {
  CHECK(adaptive_simpson([](double x) { return x * x * x - 2 * x + 1; }, 0.0, 2.0) ==
        doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("smooth integrands meet the absolute tolerance") {
  const double v = adaptive_simpson([](double x) { return std::exp(-x * x); }, -3.0, 3.0);
  CHECK(std::abs(v - std::sqrt(std::numbers::pi) * std::erf(3.0)) < 1e-10);
  CHECK(std::abs(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) -
                 2.0) < 1e-10);
}

TEST_CASE("reversed and empty ranges") {
  auto f = [](double x) { return x; };
  CHECK(adaptive_simpson(f, 1.0, 1.0) == 0.0);
  CHECK(adaptive_simpson(f, 1.0, 0.0) == doctest::Approx(-0.5));
}

TEST_CASE("kinks are handled by mandatory splits") {
  auto f = [](double x) { return std::abs(x - 0.3); };
  const double exact = 0.5 * 0.3 * 0.3 + 0.5 * 0.7 * 0.7;
  const double breaks[] = {0.3, 5.0};
  CHECK(std::abs(integrate_piecewise(f, 0.0, 1.0, breaks) - exact) < 1e-14);
}

TEST_CASE("failures are reported, not swallowed") {
  auto spike = [](double x) { return x == 0.0 ? 0.0 : 1.0 / std::sqrt(std::abs(x)); };
  try {
    adaptive_simpson(spike, -1.0, 1.0, {1e-12, 12});
    FAIL("expected QuadratureFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::QuadratureFailure);
  }
  CHECK_THROWS_AS(adaptive_simpson([](double x) { return 1.0 / x; }, 0.0, 1.0), Error);
}
