#include <doctest.h>

#include <cmath>
#include <set>

#include "kemeny/rng.hpp"

using namespace kemeny;

TEST_CASE("philox known answers") {
  using A = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams reproduce and differ") {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs_c |= x != c.next_u64();
    differs_d |= x != d.next_u64();
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("uniform moments and range") {
  RngStream r(1, 0);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
  }
  CHECK(std::abs(s / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(s2 / n - 1.0 / 3) < 0.005);
}

TEST_CASE("normal and exponential moments") {
  RngStream r(2, 0);
  const int n = 200000;
  double m = 0, v = 0, e = 0, e2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    m += z;
    v += z * z;
    const double x = r.exponential();
    REQUIRE(x > 0.0);
    e += x;
    e2 += x * x;
  }
  CHECK(std::abs(m / n) < 4 / std::sqrt(n));
  CHECK(std::abs(v / n - 1.0) < 0.02);
  CHECK(std::abs(e / n - 1.0) < 4 / std::sqrt(n));
  CHECK(std::abs(e2 / n - 2.0) < 0.05);
}

TEST_CASE("uniform buckets pass a chi-square check") {
  RngStream r(3, 11);
  const int buckets = 64, n = 640000;
  std::array<int, 64> count{};
  for (int i = 0; i < n; ++i) ++count[static_cast<int>(r.uniform() * buckets)];
  double chi2 = 0;
  const double expect = static_cast<double>(n) / buckets;
  for (int c : count) chi2 += (c - expect) * (c - expect) / expect;
  // 63 degrees of freedom; 0.9999 quantile is about 115.
  CHECK(chi2 < 115.0);
}
