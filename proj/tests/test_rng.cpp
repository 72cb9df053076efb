#include <cmath>

#include "doctest.h"
#include "mixview/rng.hpp"

using namespace mixview;

TEST_CASE("same seed gives the same sequence") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived streams are stable and distinct") {
  Rng root(7);
  Rng d1 = root.derive("data");
  Rng d1b = root.derive("data");
  CHECK(d1.next_u64() == d1b.next_u64());
  CHECK(derive_seed(7, "data") != derive_seed(7, "init"));
  CHECK(derive_seed(7, "data", 0) != derive_seed(7, "data", 1));
}

TEST_CASE("deriving does not depend on consumed state") {
  Rng a(9);
  a.next_u64();
  a.next_u64();
  Rng b(9);
  CHECK(a.derive("x").next_u64() == b.derive("x").next_u64());
}

TEST_CASE("uniform01 range and mean") {
  Rng rng(1);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  const double sigma = 1.0 / std::sqrt(12.0 * n);
  CHECK(std::abs(sum / n - 0.5) < 3 * sigma);
}

TEST_CASE("gaussian moments") {
  Rng rng(2);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sq += g * g;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("exponential mean") {
  Rng rng(3);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.exponential();
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("beta(2,2) moments") {
  Rng rng(4);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double b = rng.beta(2.0, 2.0);
    REQUIRE(b > 0.0);
    REQUIRE(b < 1.0);
    sum += b;
    sq += b * b;
  }
  const double mean = sum / n;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sq / n - mean * mean == doctest::Approx(0.05).epsilon(0.05));
}
