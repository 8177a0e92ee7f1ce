#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ergo/quadrature.hpp"
#include "ergo/rng.hpp"
#include "ergo/stats.hpp"

using namespace ergo;

TEST_CASE("rng streams are keyed and reproducible") {
  RngStream a(42, 1, 2, 3), b(42, 1, 2, 3), c(42, 1, 2, 4);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  bool differs = false;
  RngStream a2(42, 1, 2, 3);
  for (int i = 0; i < 100; ++i) differs |= (a2.next_u64() != c.next_u64());
  CHECK(differs);
}

TEST_CASE("uniform01 stays in [0,1) and looks uniform") {
  RngStream r(7, 11);
  std::vector<double> xs;
  Accumulator acc;
  for (int i = 0; i < 20000; ++i) {
    const double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    xs.push_back(u);
    acc.add(u);
  }
  CHECK(acc.mean() == doctest::Approx(0.5).epsilon(0.01));
  const double d = ks_statistic(xs, [](double x) { return x; });
  CHECK(d < ks_critical(xs.size(), 0.01));
}

TEST_CASE("exponential sampler matches its CDF (KS at 1%)") {
  RngStream r(7, 12);
  const double rate = 2.5;
  std::vector<double> xs;
  for (int i = 0; i < 5000; ++i) xs.push_back(r.exponential(rate));
  const double d = ks_statistic(xs, [&](double x) { return 1.0 - std::exp(-rate * x); });
  CHECK(d < ks_critical(xs.size(), 0.01));
  CHECK_THROWS_AS(r.exponential(0.0), std::invalid_argument);
}

TEST_CASE("normal sampler has the right moments and CDF") {
  RngStream r(7, 13);
  std::vector<double> xs;
  Accumulator acc;
  for (int i = 0; i < 20000; ++i) {
    const double z = r.normal();
    xs.push_back(z);
    acc.add(z);
  }
  CHECK(acc.mean() == doctest::Approx(0.0).epsilon(1.0));  // epsilon is relative; use margin below
  CHECK(std::abs(acc.mean()) < 0.03);
  CHECK(acc.variance() == doctest::Approx(1.0).epsilon(0.04));
  const double d =
      ks_statistic(xs, [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); });
  CHECK(d < ks_critical(xs.size(), 0.01));
}

TEST_CASE("categorical draws follow the weights") {
  RngStream r(7, 14);
  const std::vector<double> w = {0.2, 0.5, 0.3};
  std::vector<int> counts(3, 0);
  const int n = 30000;
  for (int i = 0; i < n; ++i) ++counts[r.categorical(w)];
  for (int k = 0; k < 3; ++k) {
    const double p = w[k];
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(counts[k] / double(n) - p) < 4 * se);
  }
  CHECK_THROWS_AS(r.categorical({0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("welford accumulator matches direct formulas") {
  const std::vector<double> xs = {1.0, 2.0, 4.0, 8.0, 16.0};
  Accumulator acc;
  for (double x : xs) acc.add(x);
  CHECK(acc.count() == 5);
  CHECK(acc.mean() == doctest::Approx(6.2).epsilon(1e-12));
  // unbiased variance of {1,2,4,8,16}: mean 6.2, ss = 27.04+17.64+4.84+3.24+96.04
  const double var = (27.04 + 17.64 + 4.84 + 3.24 + 96.04) / 4.0;
  CHECK(acc.variance() == doctest::Approx(var).epsilon(1e-12));
  CHECK(acc.min() == 1.0);
  CHECK(acc.max() == 16.0);
  CHECK(acc.std_error() == doctest::Approx(std::sqrt(var / 5.0)).epsilon(1e-12));
}

TEST_CASE("quantiles interpolate order statistics") {
  std::vector<double> xs = {5.0, 1.0, 3.0, 2.0, 4.0};
  CHECK(quantile(xs, 0.5) == doctest::Approx(3.0));
  CHECK(quantile(xs, 0.0) == doctest::Approx(1.0));
  CHECK(quantile(xs, 1.0) == doctest::Approx(5.0));
  CHECK(quantile(xs, 0.25) == doctest::Approx(2.0));
}

TEST_CASE("adaptive simpson hits analytic integrals") {
  const double i1 = adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
  CHECK(i1 == doctest::Approx(1.0 / 3.0).epsilon(1e-11));
  const double i2 = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12);
  CHECK(i2 == doctest::Approx(2.0).epsilon(1e-10));
  const double i3 = adaptive_simpson([](double x) { return std::exp(-x); }, 0.0, 50.0, 1e-10);
  CHECK(i3 == doctest::Approx(1.0 - std::exp(-50.0)).epsilon(1e-9));
}

TEST_CASE("adaptive simpson halving consistency") {
  auto f = [](double x) { return std::exp(-x) * std::cos(3.0 * x); };
  const double coarse = adaptive_simpson(f, 0.0, 10.0, 1e-6);
  const double fine = adaptive_simpson(f, 0.0, 10.0, 5e-7);
  CHECK(std::abs(coarse - fine) < 2e-6);
}

TEST_CASE("adaptive simpson enforces its panel budget") {
  auto nasty = [](double x) { return std::sin(1.0 / (x + 1e-8)); };
  CHECK_THROWS_AS(adaptive_simpson(nasty, 0.0, 1.0, 1e-14, 1 << 10), std::runtime_error);
}

TEST_CASE("trapezoid rule on a linear function is exact") {
  const double v = trapezoid([](double x) { return 3.0 * x + 1.0; }, 0.0, 2.0, 7);
  CHECK(v == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("fnv1a64 is stable and input-sensitive") {
  const char a[] = "a";
  CHECK(fnv1a64(a, 1) == 0xaf63dc4c8601ec8cULL);  // published test vector
  const char x[] = "scenario", y[] = "scenarip";
  CHECK(fnv1a64(x, 8) != fnv1a64(y, 8));
}
