#include <doctest.h>

#include <cmath>
#include <vector>

#include "scengen/rng.hpp"

using scengen::Rng;

TEST_CASE("same seed reproduces the stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("keyed substreams are reproducible and distinct") {
  Rng a = Rng::keyed(7, {1, 2, 3});
  Rng b = Rng::keyed(7, {1, 2, 3});
  Rng c = Rng::keyed(7, {1, 2, 4});
  CHECK(a.next() == b.next());
  CHECK(a.next() != c.next());
}

TEST_CASE("uniform draws live in their ranges") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rng.uniform_open();
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("normal moments") {
  Rng rng(11);
  const int n = 200000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("gamma moments in shape-rate form") {
  Rng rng(5);
  const double shape = 3.5, rate = 2.0;
  const int n = 200000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.gamma(shape, rate);
    CHECK(x > 0.0);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  // Gamma(shape, rate): mean shape/rate, var shape/rate^2
  CHECK(mean == doctest::Approx(shape / rate).epsilon(0.01));
  CHECK(var == doctest::Approx(shape / (rate * rate)).epsilon(0.05));
}

TEST_CASE("gamma handles shapes below one") {
  Rng rng(17);
  const double shape = 0.01;
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.gamma(shape, 1.0);
    CHECK(std::isfinite(x));
    CHECK(x >= 0.0);
    sum += x;
  }
  CHECK(sum / n == doctest::Approx(shape).epsilon(0.15));
}

TEST_CASE("beta moments and range") {
  Rng rng(23);
  const double a = 0.01, b = 0.99;  // beta-process shapes at K = 100
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.beta(a, b);
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    sum += x;
  }
  CHECK(sum / n == doctest::Approx(a / (a + b)).epsilon(0.2));

  Rng rng2(29);
  double sum2 = 0;
  for (int i = 0; i < n; ++i) sum2 += rng2.beta(5.0, 7.0);
  CHECK(sum2 / n == doctest::Approx(5.0 / 12.0).epsilon(0.01));
}

TEST_CASE("bernoulli frequency") {
  Rng rng(31);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += rng.bernoulli(0.3) ? 1 : 0;
  CHECK(static_cast<double>(hits) / n == doctest::Approx(0.3).epsilon(0.03));
  CHECK(rng.bernoulli(1.0));
  CHECK_FALSE(rng.bernoulli(0.0));
}
