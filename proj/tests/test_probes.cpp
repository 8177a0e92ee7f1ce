#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ergo/countable_chain.hpp"
#include "ergo/dual_lipschitz.hpp"
#include "ergo/jump_ifs.hpp"
#include "ergo/probes.hpp"
#include "ergo/sde.hpp"
#include "ergo/semigroup_models.hpp"

using namespace ergo;

namespace {

constexpr std::uint64_t kSeed = 20260815;

TestFunction min_x_1() {
  TestFunction f;
  f.eval = [](const Point& x) { return std::min(x[0], 1.0); };
  f.sup_bound = 1.0;
  f.lip_constant = 1.0;
  f.name = "min_x_1";
  return f;
}

TestFunction constant(double c) {
  TestFunction f;
  f.eval = [c](const Point&) { return c; };
  f.sup_bound = std::abs(c);
  f.lip_constant = 0.0;
  f.name = "const";
  return f;
}

// Identity kernel: the state never moves.
SemigroupModel frozen_model() {
  SemigroupModel m;
  m.id = "frozen";
  m.space = MetricSpace::euclidean(1);
  m.anchor = {0.0};
  m.sphere_point = [](const Point& z, double r) -> Point { return {z[0] + r}; };
  m.sampler = [](const Point& x0, double, std::uint64_t, std::uint64_t) {
    const double v = x0[0];
    return [v](double) -> Point { return {v}; };
  };
  m.exact_marginal = [](const Point& x0, double) { return EmpiricalMeasure::dirac(x0); };
  return m;
}

const EvidenceCell* find_cell(const ConditionReport& r, double t, double x0) {
  for (const auto& cell : r.grid)
    if (cell.t == doctest::Approx(t) && cell.x[0] == doctest::Approx(x0)) return &cell;
  return nullptr;
}

EmpiricalMeasure two_class_mixture(const EmpiricalMeasure& a, double w,
                                   const EmpiricalMeasure& b) {
  EmpiricalMeasure out;
  for (const auto& atom : a.atoms()) out.add(atom.point, w * atom.weight / a.total_weight());
  for (const auto& atom : b.atoms())
    out.add(atom.point, (1.0 - w) * atom.weight / b.total_weight());
  out.normalize();
  return out;
}

}  // namespace

namespace reference {

// Radial projection of a planar sample measure.
ergo::EmpiricalMeasure radial_projection(const ergo::EmpiricalMeasure& m) {
  ergo::EmpiricalMeasure out;
  for (const auto& atom : m.atoms()) out.add({std::hypot(atom.point[0], atom.point[1])}, atom.weight);
  out.normalize();
  return out;
}

// Exact time fraction of {s in [0,t] : wrapped(theta0 + s) within eps of 0}.
double rotation_ball_fraction(double theta0, double eps, double t) {
  const double period = 2.0 * std::acos(-1.0);
  double covered = 0.0;
  // Entry phases into the arc (-eps, eps) occur once per period.
  double s = std::fmod(period - theta0 - eps, period);
  if (s < 0) s += period;
  if (ergo::wrap_angle(theta0) < eps || ergo::wrap_angle(theta0) > period - eps) {
    // starts inside the arc: leading partial pass
    const double exit = std::fmod(eps - theta0 + period, period);
    covered += std::min(exit, t);
  }
  for (; s < t; s += period) covered += std::min(2.0 * eps, t - s);
  return covered / t;
}

}  // namespace reference

TEST_CASE("estimate_Qt reproduces constants up to panel rounding and validates inputs") {
  const auto model = make_model("drift_to_infinity");
  const auto est = estimate_Qt(model, constant(0.7), {1.0}, 5.0, 8, kSeed);
  // The 256-panel sum rounds a few ulps away from the constant itself.
  CHECK(est.value == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(est.std_error == 0.0);
  CHECK(est.n_trajectories == 8);
  CHECK(est.t == 5.0);
  CHECK(est.method == "ensemble_time_average");
  CHECK(std::abs(est.value) <= constant(0.7).sup_bound);
  CHECK_THROWS_AS(estimate_Qt(model, constant(1.0), {0.0}, 0.0, 8, kSeed), std::invalid_argument);
  CHECK_THROWS_AS(estimate_Qt(model, constant(1.0), {0.0}, 1.0, 1, kSeed), std::invalid_argument);
  CHECK_THROWS_AS(estimate_Qt_measure(model, {0.0}, 1.0, 4, 0, kSeed), std::invalid_argument);
}

TEST_CASE("estimate_Qt matches the exact Cesaro engine on the absorbing chain") {
  const auto model = make_model("ex1_chain");
  const TestFunction f = min_x_1();
  const double exact = cesaro_exact(ChainScenario::Example1, f, 0.5, 2.0, 1e-10);
  CHECK(exact == doctest::Approx(0.580300).epsilon(2e-5));
  const auto est = estimate_Qt(model, f, {0.5}, 2.0, 4000, kSeed);
  CHECK(std::abs(est.value - exact) < 3.0 * est.std_error + 2e-3);
  CHECK(est.std_error > 0.0);
  CHECK(std::abs(est.value) <= f.sup_bound);
}

TEST_CASE("estimate_Qt time average on the rotation approaches the arc fraction") {
  const auto model = make_model("torus_rotation");
  const TestFunction arc = make_bump_function({0.0}, 1.5607963267948966, 1.5807963267948966,
                                              model.space);  // ~indicator of B(0, pi/2)
  const auto est = estimate_Qt(model, arc, {1.0}, 500.0, 4, kSeed);
  CHECK(est.std_error == 0.0);  // deterministic dynamics: every trajectory identical
  CHECK(std::abs(est.value - 0.5) < 0.03);
}

TEST_CASE("estimate_Pt matches closed-form marginals") {
  const auto ex1 = make_model("ex1_chain");
  const TestFunction f = min_x_1();
  const double exact1 = example1_pt_f(f, 0.5, 3.0);
  const auto p1 = estimate_Pt(ex1, f, {0.5}, 3.0, 4000, kSeed);
  CHECK(p1.method == "ensemble_endpoint");
  CHECK(std::abs(p1.value - exact1) < 3.0 * p1.std_error + 1e-3);

  const auto ex3 = make_model("ex3_jump_ifs");
  const TestFunction at2 = make_bump_function({2.0}, 0.25, 0.5, ex3.space);
  const double exact3 = example3_exact_jump_prob(2, 1.0, 1.0);
  const auto p3 = estimate_Pt(ex3, at2, {0.5}, 1.0, 4000, kSeed);
  CHECK(std::abs(p3.value - exact3) < 3.0 * p3.std_error + 1e-3);

  const auto drift = make_model("drift_to_infinity");
  const auto pd = estimate_Pt(drift, min_x_1(), {0.25}, 0.5, 4, kSeed);
  CHECK(pd.value == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(pd.std_error == 0.0);
}

TEST_CASE("MC marginals converge to exact_marginal where it exists") {
  // Model-contract invariant, checked through the measure estimator at a
  // fixed time by comparing ball masses at 3 standard errors.
  const auto ex1 = make_model("ex1_chain");
  const auto exact = ex1.exact_marginal({0.2}, 4.0);
  const int n = 3000;
  Accumulator at_five;
  for (int j = 0; j < n; ++j) {
    const auto path = ex1.sampler({0.2}, 4.0, kSeed, static_cast<std::uint64_t>(j));
    at_five.add(ex1.space.distance(path(4.0), {5.0}) < 0.25 ? 1.0 : 0.0);
  }
  CHECK(std::abs(at_five.mean() - exact.ball_mass(ex1.space, {5.0}, 0.25)) <
        3.0 * at_five.std_error() + 1e-3);

  const auto rot = make_model("torus_rotation");
  CHECK(rot.exact_marginal({1.0}, 2.5).atoms()[0].point[0] ==
        doctest::Approx(wrap_angle(3.5)).epsilon(1e-12));
}

TEST_CASE("estimate_Qt_measure collapses to a dirac for an absorbed start") {
  const auto model = make_model("ex1_chain");
  const auto m = estimate_Qt_measure(model, {0.0}, 10.0, 10, 16, kSeed);
  CHECK(m.is_probability());
  const auto merged = m.merged();
  REQUIRE(merged.size() == 1);
  CHECK(merged.atoms()[0].point[0] == 0.0);
}

TEST_CASE("estimate_Qt_measure recovers the lattice mixture limit") {
  const auto model = make_model("ex2_decomposition");
  const auto m = estimate_Qt_measure(model, {5.0}, 200.0, 600, 64, kSeed);
  // Exact limit: half the mass absorbed at 0, the rest split over {1, 3}.
  EmpiricalMeasure target;
  target.add({0.0}, 0.5);
  target.add({1.0}, 0.25);
  target.add({3.0}, 0.25);
  CHECK(dual_lipschitz_auto(m, target, model.space).value < 0.05);
  // Independent oracle: uniformization Cesaro measure at the same time.
  auto chain = UniformizedChain::example2(200);
  auto oracle = chain.cesaro(5, 200.0, 1e-10).measure;
  oracle.normalize();
  CHECK(dual_lipschitz_auto(m, oracle, model.space).value < 0.05);
}

TEST_CASE("estimate_Qt_measure radial law matches the invariant amplitude sampler") {
  const auto model = make_model("hopf_mode");  // a = 1, b = 0.5
  const auto planar = estimate_Qt_measure(model, {1.0, 0.0}, 30.0, 1200, 16, kSeed);
  const auto radial = reference::radial_projection(planar);
  EmpiricalMeasure lambda_law;
  for (int i = 0; i < 1200; ++i)
    lambda_law.add({hopf_lambda_sample(1.0, 0.5, 1e-4, kSeed + 1, static_cast<std::uint64_t>(i))},
                   1.0);
  lambda_law.normalize();
  const auto dl = dual_lipschitz_auto(radial, lambda_law, MetricSpace::euclidean(1));
  CHECK(dl.value < 0.08);
}

TEST_CASE("probe_lower_bound C3 on the rotation supports the arc bound") {
  const auto model = make_model("torus_rotation");
  const auto t_grid = geometric_grid(100.0, 1.5, 12);
  const auto report = probe_lower_bound(model, LowerBoundCondition::C3, {{0.0}},
                                        std::acos(-1.0) / 2, {{0.0}, {1.0}, {3.0}}, t_grid, 400,
                                        kSeed);
  CHECK(report.condition == "C3");
  CHECK(report.verdict == "supported");
  CHECK(std::abs(report.proxy - 0.5) < 0.01);
  CHECK(report.trailing_from == 6);
  CHECK(report.grid.size() == 3 * t_grid.size());
  CHECK(report.t_grid == t_grid);
  // Exact-oracle row: the deterministic arc fraction at one grid cell.
  const auto* cell = find_cell(report, t_grid[8], 1.0);
  REQUIRE(cell != nullptr);
  const double exact = reference::rotation_ball_fraction(1.0, std::acos(-1.0) / 2, t_grid[8]);
  CHECK(std::abs(cell->estimate - exact) < 3.0 * cell->std_error + 1e-3);
}

TEST_CASE("probe_lower_bound C4 holds on the halving pair and fails for pure drift") {
  // Trailing window past t ~ 230 so even the slow start x = 5 (expected
  // first-halving time ~ e^5) has usually begun its collapse.
  const auto ex6 = make_model("ex6_place_dependent");
  const auto report = probe_lower_bound(ex6, LowerBoundCondition::C4, {{0.0}}, 0.5,
                                        {{0.5}, {1.0}, {5.0}}, geometric_grid(20.0, 1.5, 12),
                                        400, kSeed);
  CHECK(report.verdict == "supported");
  CHECK(report.proxy > 0.5);  // the halving pair piles mass onto [0, 1/2)

  const auto drift = make_model("drift_to_infinity");
  const auto gone = probe_lower_bound(drift, LowerBoundCondition::C4, {{0.0}}, 1.0,
                                      {{0.0}, {10.0}}, geometric_grid(2.0, 1.5, 8), 16, kSeed);
  CHECK(gone.verdict == "refuted_at_confidence");
  CHECK(gone.has_witness);
  CHECK(gone.witness.estimate == 0.0);
  CHECK(gone.witness.std_error == 0.0);

  const auto swept = probe_lower_bound(drift, LowerBoundCondition::C2, {{0.0}}, 1.0, {{10.0}},
                                       geometric_grid(2.0, 1.5, 8), 16, kSeed);
  CHECK(swept.verdict == "refuted_at_confidence");  // Q_t(10, B(0,1)) is identically 0
}

TEST_CASE("probe_lower_bound validates its inputs") {
  const auto model = make_model("drift_to_infinity");
  const auto grid = geometric_grid(1.0, 1.5, 4);
  CHECK_THROWS_AS(probe_lower_bound(model, LowerBoundCondition::C2, {{0.0}, {1.0}}, 0.5, {{0.0}},
                                    grid, 8, kSeed),
                  std::invalid_argument);
  CHECK_THROWS_AS(probe_lower_bound(model, LowerBoundCondition::C2, {{0.0}}, 0.0, {{0.0}}, grid,
                                    8, kSeed),
                  std::invalid_argument);
  CHECK_THROWS_AS(probe_lower_bound(model, LowerBoundCondition::C2, {{0.0}}, 0.5, {}, grid, 8,
                                    kSeed),
                  std::invalid_argument);
  CHECK_THROWS_AS(probe_lower_bound(model, LowerBoundCondition::C2, {{0.0}}, 0.5, {{0.0}},
                                    {1.0, 2.0, 3.0}, 8, kSeed),
                  std::invalid_argument);
  CHECK_THROWS_AS(geometric_grid(0.0, 1.5, 4), std::invalid_argument);
  CHECK_THROWS_AS(geometric_grid(1.0, 1.0, 4), std::invalid_argument);
}

TEST_CASE("probe_regularity refutes the Cesaro e-property at the chain origin") {
  const auto model = make_model("ex1_chain");
  const auto report =
      probe_regularity(model, RegularityNotion::CesaroEProp, {0.0}, min_x_1(),
                       {0.5, 0.2, 0.1, 0.05}, geometric_grid(2.0, 1.5, 10), 800, kSeed);
  CHECK(report.condition == "cesaro_e_prop");
  CHECK(report.verdict == "refuted_at_confidence");
  REQUIRE(report.has_witness);
  CHECK(std::abs(report.witness.estimate) > 0.22);
  // The analytic floor 1 - 2/e holds at every probed radius (t = n is in
  // the grid's range for each n), up to Monte Carlo noise.
  REQUIRE(report.gap_curve.size() == 4);
  for (const auto& row : report.gap_curve) {
    CHECK(row[1] > 1.0 - 2.0 * std::exp(-1.0) - 3.0 * row[2] - 0.04);
    CHECK(row[1] > 0.22);
  }
}

TEST_CASE("probe_regularity separates eventual continuity from the e-property") {
  const auto model = make_model("ex1_chain");
  const auto t_grid = geometric_grid(8.0, 1.5, 12);
  const std::vector<double> radii{0.5, 0.25, 0.2};
  const auto evc = probe_regularity(model, RegularityNotion::Evc, {0.0}, min_x_1(), radii,
                                    t_grid, 500, kSeed, 0.02);
  CHECK(evc.verdict == "supported");
  CHECK(evc.proxy < 0.02);

  const auto eprop = probe_regularity(model, RegularityNotion::EProp, {0.0}, min_x_1(), radii,
                                      t_grid, 500, kSeed, 0.05);
  CHECK(eprop.verdict == "refuted_at_confidence");
  REQUIRE(eprop.has_witness);
  // sup_t P_t f(1/5) at t >= 8 is (1 + t)/5 e^{-t/5}, maximized at the first
  // grid point: 1.8 e^{-1.6}.
  const double exact_sup = example1_sup_gap_after(5, 8.0);
  CHECK(exact_sup == doctest::Approx(1.8 * std::exp(-1.6)).epsilon(1e-12));
  CHECK(std::abs(eprop.proxy - exact_sup) < 3.0 * eprop.proxy_se + 0.01);
}

TEST_CASE("probe_regularity on the identity kernel reproduces function increments") {
  const auto model = frozen_model();
  const TestFunction f = make_clipped_distance({0.0}, 1.0, model.space);
  const auto report = probe_regularity(model, RegularityNotion::EProp, {0.0}, f,
                                       {0.4, 0.2, 0.1}, geometric_grid(1.0, 2.0, 4), 8, kSeed,
                                       0.15);
  CHECK(report.verdict == "supported");
  REQUIRE(report.gap_curve.size() == 3);
  CHECK(report.gap_curve[0][1] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(report.gap_curve[1][1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(report.gap_curve[2][1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(report.gap_curve[2][2] == 0.0);  // deterministic: no ensemble spread
}

TEST_CASE("cesaro gap curves are dominated by sup-level gap curves") {
  // Consistency of the two notions: |Q_t f(x) - Q_t f(z)| averages the
  // instantaneous gaps, so its curve sits below the sup_t curve up to noise.
  const auto model = make_model("ex6_place_dependent");
  const TestFunction f = min_x_1();
  const std::vector<double> radii{0.4, 0.2, 0.1};
  const auto t_grid = geometric_grid(2.0, 1.5, 10);
  const auto sup_level = probe_regularity(model, RegularityNotion::EProp, {0.5}, f, radii,
                                          t_grid, 400, kSeed, 0.06);
  const auto cesaro = probe_regularity(model, RegularityNotion::CesaroEProp, {0.5}, f, radii,
                                       t_grid, 400, kSeed, 0.06);
  REQUIRE(sup_level.gap_curve.size() == radii.size());
  REQUIRE(cesaro.gap_curve.size() == radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i)
    CHECK(cesaro.gap_curve[i][1] <=
          sup_level.gap_curve[i][1] + 3.0 * (sup_level.gap_curve[i][2] + cesaro.gap_curve[i][2]) +
              0.05);
  // Both eventual-continuity readings hold on this contractive family.
  const auto evc = probe_regularity(model, RegularityNotion::Evc, {0.5}, f, radii, t_grid, 400,
                                    kSeed, 0.06);
  const auto cevc = probe_regularity(model, RegularityNotion::CesaroEvc, {0.5}, f, radii, t_grid,
                                     400, kSeed, 0.06);
  CHECK(evc.verdict == "supported");
  CHECK(cevc.verdict == "supported");
}

TEST_CASE("ergodic_decomposition separates the lattice chain classes") {
  const auto model = make_model("ex2_decomposition");
  const std::vector<Point> x_list{{0.0}, {1.0}, {3.0}, {5.0}, {7.0}};
  const auto report = ergodic_decomposition(model, x_list, 200.0, 500, 0.08, kSeed, 64);
  REQUIRE(report.cluster_of.size() == 5);
  CHECK(report.clusters.size() == 4);
  CHECK(report.cluster_of[1] == report.cluster_of[2]);  // {1, 3} share a class
  CHECK(report.cluster_of[0] != report.cluster_of[1]);
  CHECK(report.cluster_of[0] != report.cluster_of[3]);
  CHECK(report.cluster_of[3] != report.cluster_of[4]);
  for (char s : report.stable) CHECK(static_cast<bool>(s));
  // Every x belongs to exactly one class and the clusters partition the list.
  std::size_t members = 0;
  for (const auto& c : report.clusters) members += c.size();
  CHECK(members == x_list.size());

  // Absorbing and cycling classes are ergodic candidates; odd starts are
  // flagged as visible mixtures of them.
  const int c0 = report.cluster_of[0], c1 = report.cluster_of[1];
  const int c5 = report.cluster_of[3], c7 = report.cluster_of[4];
  CHECK(static_cast<bool>(report.ergodic_candidate[static_cast<std::size_t>(c0)]));
  CHECK(static_cast<bool>(report.ergodic_candidate[static_cast<std::size_t>(c1)]));
  CHECK_FALSE(static_cast<bool>(report.ergodic_candidate[static_cast<std::size_t>(c5)]));
  CHECK_FALSE(static_cast<bool>(report.ergodic_candidate[static_cast<std::size_t>(c7)]));

  // Ergodic supports {0} and {1,3} stay disjoint: no EMDS violation.
  CHECK_FALSE(report.emds_violation);
  CHECK(report.support_gap[static_cast<std::size_t>(c0)][static_cast<std::size_t>(c1)] >
        1.0 - 1e-9);

  // Mixture identities for the odd starts 2n+1, n = 2, 3, 4.
  const auto& eps0 = report.limits[0];
  const auto& eps1 = report.limits[1];
  CHECK(dual_lipschitz_auto(report.limits[3], two_class_mixture(eps0, 0.5, eps1), model.space)
            .value < 0.08);
  CHECK(dual_lipschitz_auto(report.limits[4], two_class_mixture(eps0, 1.0 / 3.0, eps1),
                            model.space)
            .value < 0.08);
  const auto eps9 = estimate_Qt_measure(model, {9.0}, 200.0, 500, 64, kSeed);
  CHECK(dual_lipschitz_auto(eps9, two_class_mixture(eps0, 0.25, eps1), model.space).value <
        0.08);
}

TEST_CASE("ergodic_decomposition finds one global class for the halving pair") {
  const auto model = make_model("ex6_place_dependent");
  const auto report =
      ergodic_decomposition(model, {{0.5}, {1.0}, {2.0}}, 100.0, 300, 0.15, kSeed, 32);
  CHECK(report.clusters.size() == 1);
  // The single limit concentrates near the absorbing point.
  const auto& m = report.limits[0];
  CHECK(m.ball_mass(model.space, {0.0}, 0.25) > 0.5);
}

TEST_CASE("ergodic_decomposition flags overlapping supports for the random amplitude mode") {
  const auto model = make_model("hopf_mode");
  const auto report = ergodic_decomposition(model, {{0.0, 0.0}, {1e-3, 0.0}}, 80.0, 400, 0.25,
                                            kSeed, 32, 0.05);
  REQUIRE(report.clusters.size() == 2);
  CHECK(static_cast<bool>(report.stable[0]));
  CHECK(static_cast<bool>(report.stable[1]));
  CHECK(static_cast<bool>(report.ergodic_candidate[0]));
  CHECK(static_cast<bool>(report.ergodic_candidate[1]));
  // The zero start is pinned at the origin while the small start's Cesaro
  // occupation keeps early near-zero states: supports touch at 0.
  CHECK(report.support_gap[0][1] < 0.05);
  CHECK(report.emds_violation);
  REQUIRE(report.emds_pairs.size() == 1);
}

TEST_CASE("weak_star check separates Cesaro collapse from marginal convergence on the rotation") {
  const auto model = make_model("torus_rotation");
  const auto report = weak_star_mean_ergodicity_check(model, {{0.0}, {1.7}}, model.f_dictionary,
                                                      geometric_grid(100.0, 1.5, 12), 64, kSeed,
                                                      0.05);
  CHECK(report.condition == "weak_star_mean_ergodicity");
  CHECK(report.verdict == "supported");
  REQUIRE(report.sub_verdicts.size() == 3);
  std::string pt, c3, evc;
  for (const auto& [name, verdict] : report.sub_verdicts) {
    if (name == "pt_level_convergence") pt = verdict;
    if (name == "lower_bound_C3") c3 = verdict;
    if (name == "cesaro_evc") evc = verdict;
  }
  CHECK(pt == "refuted_at_confidence");  // P_t delta_x never settles
  CHECK(c3 == "supported");
  CHECK(evc == "supported");
}

TEST_CASE("weak_star collapse with a refuted Cesaro e-property on the product IFS") {
  const auto model = make_model("ex5_ifs_times_rotation");
  const auto t_grid = geometric_grid(3.0, 1.5, 9);
  const auto ws = weak_star_mean_ergodicity_check(model, {{0.5, 0.0}, {2.0, 1.0}},
                                                  model.f_dictionary, t_grid, 500, kSeed, 0.1);
  CHECK(ws.verdict == "supported");

  const auto ceprop =
      probe_regularity(model, RegularityNotion::CesaroEProp, {0.0, 0.0}, min_x_1(),
                       {0.5, 0.25, 0.125}, t_grid, 500, kSeed, 0.05);
  CHECK(ceprop.verdict == "refuted_at_confidence");
  CHECK(ceprop.has_witness);
}

TEST_CASE("weak_star trivially supported for a constant-state model") {
  const auto model = frozen_model();
  std::vector<TestFunction> fs{constant(0.3), constant(-0.1), constant(0.0)};
  const auto report = weak_star_mean_ergodicity_check(model, {{0.2}, {0.2}}, fs,
                                                      geometric_grid(1.0, 2.0, 4), 4, kSeed);
  CHECK(report.verdict == "supported");
  CHECK(report.proxy == 0.0);
  CHECK_THROWS_AS(weak_star_mean_ergodicity_check(model, {{0.2}}, fs, geometric_grid(1.0, 2.0, 4),
                                                  4, kSeed),
                  std::invalid_argument);
  CHECK_THROWS_AS(weak_star_mean_ergodicity_check(model, {{0.2}, {0.3}},
                                                  {constant(0.0), constant(1.0)},
                                                  geometric_grid(1.0, 2.0, 4), 4, kSeed),
                  std::invalid_argument);
}

TEST_CASE("sweep_check clears the negative window on the lattice chain") {
  const auto model = make_model("ex2_decomposition");
  const std::vector<Point> K{{-3.0}, {-2.0}, {-1.0}};
  const std::vector<double> t_grid{1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0};
  const auto report =
      sweep_check(model, K, 0.5, {{0.0}, {1.0}, {5.0}, {-2.0}}, t_grid, 500, kSeed);
  CHECK(report.condition == "sweep");
  CHECK(report.verdict == "supported");
  CHECK(report.proxy <= 3.0 * report.proxy_se);

  // Uniformization oracle at an early transient cell from the start -2.
  auto chain = UniformizedChain::example2(200);
  const auto exact = chain.transition(-2, 4.0, 1e-10).measure;
  double in_K = 0.0;
  for (const auto& atom : exact.atoms())
    if (atom.point[0] >= -3.0 && atom.point[0] <= -1.0) in_K += atom.weight;
  const auto* cell = find_cell(report, 4.0, -2.0);
  REQUIRE(cell != nullptr);
  CHECK(std::abs(cell->estimate - in_K) < 3.0 * cell->std_error + 1e-3);

  // Empty sweep set: identically zero, trivially supported.
  const auto empty = sweep_check(model, {}, 0.5, {{1.0}}, t_grid, 8, kSeed);
  CHECK(empty.verdict == "supported");
  for (const auto& c : empty.grid) {
    CHECK(c.estimate == 0.0);
    CHECK(c.std_error == 0.0);
  }
}

TEST_CASE("reports serialize with evidence, metadata, and bitwise reproducibility") {
  const auto model = make_model("ex6_place_dependent");
  const auto grid = geometric_grid(2.0, 1.5, 6);
  const auto a = probe_lower_bound(model, LowerBoundCondition::C2, {{0.0}}, 0.5, {{1.0}}, grid,
                                   64, kSeed);
  const auto b = probe_lower_bound(model, LowerBoundCondition::C2, {{0.0}}, 0.5, {{1.0}}, grid,
                                   64, kSeed);
  CHECK(report_to_json(a).dump() == report_to_json(b).dump());

  const auto j = report_to_json(a);
  CHECK(j.at("version").get<std::string>() == std::string("1.0.0"));
  CHECK(j.at("seed").get<std::uint64_t>() == kSeed);
  CHECK(j.at("n_traj").get<int>() == 64);
  CHECK(j.at("t_grid").size() == 6);
  CHECK(j.at("grid").size() == a.grid.size());
  CHECK(j.at("condition").get<std::string>() == "C2");

  const std::string csv = report_to_csv(a);
  CHECK(csv.rfind("label,t,estimate,std_error,x0", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(a.grid.size()) + 1);

  // Coupled-seed reproducibility of regularity gap curves, bit for bit.
  const auto r1 = probe_regularity(model, RegularityNotion::CesaroEvc, {0.0}, min_x_1(),
                                   {0.5, 0.25}, grid, 64, kSeed);
  const auto r2 = probe_regularity(model, RegularityNotion::CesaroEvc, {0.0}, min_x_1(),
                                   {0.5, 0.25}, grid, 64, kSeed);
  REQUIRE(r1.gap_curve.size() == r2.gap_curve.size());
  for (std::size_t i = 0; i < r1.gap_curve.size(); ++i) {
    CHECK(r1.gap_curve[i][1] == r2.gap_curve[i][1]);
    CHECK(r1.gap_curve[i][2] == r2.gap_curve[i][2]);
  }
  const auto rj = report_to_json(r1);
  CHECK(rj.contains("gap_curve"));

  const auto decomp = ergodic_decomposition(make_model("ex2_decomposition"), {{0.0}, {1.0}},
                                            40.0, 64, 0.2, kSeed, 16);
  const auto dj = decomposition_to_json(decomp, MetricSpace::countable());
  CHECK(dj.at("clusters").size() == decomp.clusters.size());
  CHECK(dj.at("limits").size() == 2);
  const std::string dcsv = decomposition_to_csv(decomp);
  CHECK(dcsv.rfind("i,j,distance", 0) == 0);
}

TEST_CASE("sampler failures carry the trajectory index") {
  SemigroupModel model = frozen_model();
  model.sampler = [](const Point& x0, double, std::uint64_t, std::uint64_t traj) {
    if (traj >= 3) throw std::runtime_error("boom");
    const double v = x0[0];
    return SemigroupModel::StateAt([v](double) -> Point { return {v}; });
  };
  try {
    estimate_Qt(model, constant(1.0), {0.0}, 1.0, 8, kSeed);
    FAIL("expected a trajectory failure");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("trajectory 3") != std::string::npos);
    CHECK(msg.find("boom") != std::string::npos);
  }
}

TEST_CASE("model registry rejects unknown ids and parameters") {
  CHECK_THROWS_AS(make_model("nope"), std::invalid_argument);
  CHECK_THROWS_AS(make_model("hopf_mode", {{"bad_key", 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_model("lorenz", {{"rho", 1.5}}), std::invalid_argument);
  CHECK(model_ids().size() == 11);
  for (const auto& id : model_ids()) {
    const auto m = make_model(id);
    CHECK(m.id == id);
    CHECK(m.sampler != nullptr);
    CHECK(m.sphere_point != nullptr);
    CHECK_FALSE(m.default_x_grid.empty());
    CHECK(m.f_dictionary.size() >= 3);
    for (const auto& f : m.f_dictionary) CHECK(f.bl_norm() <= 1.0 + 1e-12);
    // Markov reproducibility: identical trajectories under identical keys.
    const Point x0 = m.default_x_grid.front();
    const auto p1 = m.sampler(x0, 2.0, kSeed, 7);
    const auto p2 = m.sampler(x0, 2.0, kSeed, 7);
    for (double t : {0.0, 0.7, 1.9}) {
      const Point a = p1(t), b = p2(t);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }
  }
}

TEST_CASE("lattice and product samplers stay on their state spaces") {
  const auto ex2 = make_model("ex2_decomposition");
  const auto path = ex2.sampler({7.0}, 50.0, kSeed, 0);
  for (double t : {0.0, 1.0, 5.0, 20.0, 50.0}) {
    const double s = path(t)[0];
    CHECK(s == std::nearbyint(s));
  }
  CHECK_THROWS_AS(ex2.sampler({0.5}, 1.0, kSeed, 0), std::invalid_argument);

  const auto ex7 = make_model("ex7_ex6_times_rotation");
  const auto p7 = ex7.sampler({1.0, 0.5}, 10.0, kSeed, 3);
  for (double t : {0.0, 2.0, 7.5}) {
    const Point s = p7(t);
    REQUIRE(s.size() == 2);
    CHECK(s[0] >= 0.0);
    CHECK(s[1] >= 0.0);
    CHECK(s[1] < 2.0 * std::acos(-1.0));
    CHECK(s[1] == doctest::Approx(wrap_angle(0.5 + t)).epsilon(1e-9));
  }
}
