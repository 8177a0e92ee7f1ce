#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ergo/dual_lipschitz.hpp"
#include "ergo/empirical_measure.hpp"
#include "ergo/metric_space.hpp"
#include "ergo/rng.hpp"
#include "ergo/stats.hpp"
#include "ergo/test_function.hpp"

using namespace ergo;

namespace reference {

// Two-atom dual-Lipschitz distance, derived independently of the solver:
// for delta_x vs delta_y at distance d the optimal split is L = 2/(2+d),
// giving value 2d/(2+d).
double two_point_distance(double d) { return 2.0 * d / (2.0 + d); }

}  // namespace reference

namespace {

EmpiricalMeasure random_measure(RngStream& r, const MetricSpace& space, std::size_t n_atoms,
                                double spread) {
  EmpiricalMeasure m;
  for (std::size_t i = 0; i < n_atoms; ++i) {
    Point p(space.dimension());
    for (auto& c : p) c = r.uniform(-spread, spread);
    m.add(p, r.uniform(0.1, 1.0));
  }
  m.normalize();
  return m;
}

}  // namespace

TEST_CASE("metric axioms hold on sampled triples") {
  const MetricSpace spaces[] = {MetricSpace::euclidean(2), MetricSpace::torus(),
                                MetricSpace::product(MetricSpace::euclidean(1), MetricSpace::torus())};
  RngStream r(101, 1);
  for (const auto& space : spaces) {
    for (int trial = 0; trial < 10000; ++trial) {
      Point x(space.dimension()), y(space.dimension()), z(space.dimension());
      for (auto& c : x) c = r.uniform(-10.0, 10.0);
      for (auto& c : y) c = r.uniform(-10.0, 10.0);
      for (auto& c : z) c = r.uniform(-10.0, 10.0);
      const double dxy = space.distance(x, y);
      const double dyx = space.distance(y, x);
      const double dxz = space.distance(x, z);
      const double dzy = space.distance(z, y);
      REQUIRE(dxy >= 0.0);
      REQUIRE(std::abs(dxy - dyx) <= 1e-12);
      REQUIRE(space.distance(x, x) <= 1e-12);
      REQUIRE(dxy <= dxz + dzy + 1e-12);
    }
  }
}

TEST_CASE("component distances match hand values") {
  const auto e1 = MetricSpace::euclidean(1);
  CHECK(e1.distance({3.0}, {-1.0}) == doctest::Approx(4.0));
  const auto e2 = MetricSpace::euclidean(2);
  CHECK(e2.distance({0.0, 0.0}, {3.0, 4.0}) == doctest::Approx(5.0));
  const auto t = MetricSpace::torus();
  CHECK(t.distance({0.1}, {2.0 * std::numbers::pi - 0.1}) == doctest::Approx(0.2));
  CHECK(t.distance({0.0}, {std::numbers::pi}) == doctest::Approx(std::numbers::pi));
  const auto c = MetricSpace::countable();
  CHECK(c.distance({3.0}, {7.0}) == doctest::Approx(4.0));
  const auto prod = MetricSpace::product(e1, t);
  CHECK(prod.distance({0.0, 0.0}, {1.0, std::numbers::pi}) == doctest::Approx(std::numbers::pi));
  CHECK(prod.distance({5.0, 0.1}, {1.0, 0.2}) == doctest::Approx(4.0));
}

TEST_CASE("space descriptors round-trip") {
  const auto prod = MetricSpace::product(MetricSpace::euclidean(3),
                                         MetricSpace::product(MetricSpace::torus(2), MetricSpace::countable()));
  CHECK(prod.descriptor() == "product(euclidean(3),torus(2),countable)");
  CHECK(MetricSpace::from_descriptor(prod.descriptor()) == prod);
  CHECK(MetricSpace::from_descriptor("euclidean(1)") == MetricSpace::euclidean(1));
  CHECK_THROWS(MetricSpace::from_descriptor("hyperbolic(2)"));
}

TEST_CASE("dual-Lipschitz oracle: unit-separated Diracs give 2/3") {
  const auto space = MetricSpace::euclidean(1);
  const auto mu = EmpiricalMeasure::dirac({0.0});
  const auto nu = EmpiricalMeasure::dirac({1.0});
  const auto res = dual_lipschitz_distance(mu, nu, space, DlMode::ExactSmall);
  CHECK(res.value == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
  CHECK(res.lipschitz_budget == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK_FALSE(res.lower_bound);
}

TEST_CASE("dual-Lipschitz oracle: close Diracs give 0.2/2.1") {
  const auto space = MetricSpace::euclidean(1);
  const auto res = dual_lipschitz_distance(EmpiricalMeasure::dirac({0.0}),
                                           EmpiricalMeasure::dirac({0.1}), space,
                                           DlMode::ExactSmall);
  CHECK(res.value == doctest::Approx(0.2 / 2.1).epsilon(1e-8));
}

TEST_CASE("dual-Lipschitz matches the two-point closed form across separations") {
  const auto space = MetricSpace::euclidean(1);
  for (double d : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 50.0}) {
    const auto res = dual_lipschitz_distance(EmpiricalMeasure::dirac({0.0}),
                                             EmpiricalMeasure::dirac({d}), space,
                                             DlMode::ExactSmall);
    CHECK(res.value == doctest::Approx(reference::two_point_distance(d)).epsilon(1e-7));
  }
}

TEST_CASE("dual-Lipschitz behaves as a pseudometric on sampled measures") {
  const auto space = MetricSpace::euclidean(1);
  RngStream r(202, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = random_measure(r, space, 3, 2.0);
    const auto b = random_measure(r, space, 3, 2.0);
    const auto c = random_measure(r, space, 3, 2.0);
    const double dab = dual_lipschitz_distance(a, b, space, DlMode::ExactSmall).value;
    const double dba = dual_lipschitz_distance(b, a, space, DlMode::ExactSmall).value;
    const double daa = dual_lipschitz_distance(a, a, space, DlMode::ExactSmall).value;
    const double dac = dual_lipschitz_distance(a, c, space, DlMode::ExactSmall).value;
    const double dcb = dual_lipschitz_distance(c, b, space, DlMode::ExactSmall).value;
    REQUIRE(daa <= 1e-9);
    REQUIRE(std::abs(dab - dba) <= 1e-9);
    REQUIRE(dab <= dac + dcb + 1e-9);
    REQUIRE(dab <= 2.0 + 1e-9);  // diameter bound of the unit-ball pairing
  }
}

TEST_CASE("dictionary mode lower-bounds the exact distance") {
  const auto space = MetricSpace::euclidean(2);
  RngStream r(202, 2);
  for (int trial = 0; trial < 25; ++trial) {
    const auto a = random_measure(r, space, 5, 3.0);
    const auto b = random_measure(r, space, 5, 3.0);
    const auto exact = dual_lipschitz_distance(a, b, space, DlMode::ExactSmall);
    const auto dict = dual_lipschitz_distance(a, b, space, DlMode::Dictionary);
    REQUIRE(dict.lower_bound);
    REQUIRE(dict.value <= exact.value + 1e-9);
    REQUIRE(dict.value >= 0.0);
  }
}

TEST_CASE("exact mode rejects oversized supports") {
  const auto space = MetricSpace::euclidean(1);
  EmpiricalMeasure big;
  for (int i = 0; i < 70; ++i) big.add({double(i)}, 1.0);
  big.normalize();
  CHECK_THROWS_AS(dual_lipschitz_distance(big, EmpiricalMeasure::dirac({0.0}), space,
                                          DlMode::ExactSmall),
                  std::invalid_argument);
}

TEST_CASE("auto mode quantile-bins large 1-d samples") {
  const auto space = MetricSpace::euclidean(1);
  RngStream r(202, 3);
  EmpiricalMeasure a, b;
  for (int i = 0; i < 5000; ++i) {
    a.add({r.normal()}, 1.0);
    b.add({r.normal() + 0.5}, 1.0);
  }
  a.normalize();
  b.normalize();
  const auto res = dual_lipschitz_auto(a, b, space);
  CHECK_FALSE(res.lower_bound);
  CHECK(res.binning_deviation > 0.0);
  CHECK(res.binning_deviation < 0.2);
  // Shift by 0.5 between standard normals: the distance is strictly positive
  // and below both the total-variation cap and the mean shift.
  CHECK(res.value > 0.1);
  CHECK(res.value < 0.5);
  const auto same = dual_lipschitz_auto(a, a, space);
  CHECK(same.value <= 1e-9);
}

TEST_CASE("bump function oracle: midpoint of the ramp is 1/2") {
  const auto space = MetricSpace::euclidean(1);
  const auto f = make_bump_function({0.0}, 1.0, 2.0, space);
  CHECK(f({1.5}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f({0.3}) == doctest::Approx(1.0));
  CHECK(f({2.5}) == doctest::Approx(0.0));
  CHECK(f.lip_constant == doctest::Approx(1.0));
}

TEST_CASE("bump function satisfies its own certificates on sampled points") {
  const auto space = MetricSpace::euclidean(2);
  const Point z = {0.5, -0.25};
  const auto f = make_bump_function(z, 0.75, 2.5, space);
  RngStream r(303, 1);
  Point prev = {0.0, 0.0};
  double fprev = f(prev);
  for (int i = 0; i < 10000; ++i) {
    Point x = {r.uniform(-4.0, 4.0), r.uniform(-4.0, 4.0)};
    const double v = f(x);
    REQUIRE(v >= 0.0);
    REQUIRE(v <= f.sup_bound);
    if (space.distance(x, z) <= 0.75) REQUIRE(v == doctest::Approx(1.0));
    if (space.distance(x, z) >= 2.5) REQUIRE(v == doctest::Approx(0.0));
    REQUIRE(std::abs(v - fprev) <= f.lip_constant * space.distance(x, prev) + 1e-12);
    prev = x;
    fprev = v;
  }
}

TEST_CASE("ball mass of a standard normal sample near the 68.27% mark") {
  const auto space = MetricSpace::euclidean(1);
  RngStream r(303, 2);
  EmpiricalMeasure m;
  const int n = 200000;
  for (int i = 0; i < n; ++i) m.add({r.normal()}, 1.0);
  CHECK(m.ball_mass(space, {0.0}, 1.0) == doctest::Approx(0.6826894921).epsilon(0.01));
}

TEST_CASE("ball mass uses a strict inequality at the boundary") {
  const auto space = MetricSpace::euclidean(1);
  EmpiricalMeasure m;
  m.add({0.0}, 0.5);
  m.add({1.0}, 0.5);
  CHECK(m.ball_mass(space, {0.0}, 1.0) == doctest::Approx(0.5));   // atom at distance 1 excluded
  CHECK(m.ball_mass(space, {0.0}, 1.0 + 1e-9) == doctest::Approx(1.0));
}

TEST_CASE("empirical measure invariants and serialization round-trips") {
  EmpiricalMeasure m;
  CHECK_THROWS_AS(m.add({0.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(m.add({0.0}, -1.0), std::invalid_argument);
  m.add({1.0}, 0.25);
  m.add({2.0}, 0.25);
  m.add({1.0}, 0.5);
  CHECK(m.total_weight() == doctest::Approx(1.0));
  CHECK(m.is_probability());

  const auto merged = m.merged();
  CHECK(merged.size() == 2);

  std::stringstream ss(m.to_csv());
  const auto back = EmpiricalMeasure::from_csv(ss);
  CHECK(back.size() == m.size());
  CHECK(back.total_weight() == doctest::Approx(1.0));

  const auto space = MetricSpace::euclidean(1);
  MetricSpace parsed = MetricSpace::countable();
  const auto fromj = EmpiricalMeasure::from_json(m.to_json(space), &parsed);
  CHECK(parsed == space);
  CHECK(fromj.size() == m.size());

  const auto f = make_clipped_distance({0.0}, 10.0, space);
  CHECK(m.integrate(f) == doctest::Approx(0.25 * 1 + 0.25 * 2 + 0.5 * 1).epsilon(1e-12));
}

TEST_CASE("quantile binning preserves mass and mean") {
  RngStream r(303, 3);
  EmpiricalMeasure m;
  Accumulator direct;
  for (int i = 0; i < 10000; ++i) {
    const double x = r.exponential(1.0);
    m.add({x}, 1.0);
    direct.add(x);
  }
  double dev = 0.0;
  const auto binned = quantile_binned(m, 32, &dev);
  CHECK(binned.size() == 32);
  CHECK(binned.total_weight() == doctest::Approx(m.total_weight()).epsilon(1e-9));
  double wmean = 0.0;
  for (const auto& a : binned.atoms()) wmean += a.weight * a.point[0];
  CHECK(wmean / binned.total_weight() == doctest::Approx(direct.mean()).epsilon(1e-6));
  CHECK(dev > 0.0);
  CHECK(dev < 0.2);  // 32 equal-mass bins of Exp(1) have small within-bin spread
}

TEST_CASE("normalized test functions carry unit budget") {
  const auto space = MetricSpace::euclidean(1);
  const auto f = normalized(make_clipped_distance({0.0}, 5.0, space));
  CHECK(f.bl_norm() == doctest::Approx(1.0));
  CHECK(f({3.0}) == doctest::Approx(0.5));
}
