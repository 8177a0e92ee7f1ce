#pragma once

// Model-generic numerical probes for regularity and lower-bound properties of
// Markov semigroups, plus an empirical ergodic-decomposition explorer.
//
// The central approximation, used everywhere and stated loudly: limsup/liminf
// over continuous time is replaced by the max/min over the trailing half of a
// finite geometric t-grid, and infima over the whole state space by minima
// over a scenario-declared finite grid of starts. Verdicts are therefore
// grid-relative ("supported on grid"), never universal, and every report
// carries the full evidence grid and window metadata that produced it.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ergo/empirical_measure.hpp"
#include "ergo/semigroup_models.hpp"
#include "ergo/stats.hpp"
#include "ergo/test_function.hpp"

namespace ergo {

// Time-quadrature resolution of per-trajectory Cesaro averages.
inline constexpr int kQtPanels = 256;
// Stratified time samples per trajectory for occupation measures.
inline constexpr int kQtTimeSamples = 64;
// Substream tag reserved for probe-level time sampling (must not collide with
// any model substream; model ids stay far below this value).
inline constexpr std::uint64_t kTagProbeTime = 0x51745461;

struct CesaroEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int n_trajectories = 0;
  double t = 0.0;
  std::string method = "ensemble_time_average";
};

struct EvidenceCell {
  double t = 0.0;
  Point x;
  double estimate = 0.0;   // signed where a gap is estimated
  double std_error = 0.0;
  std::string label;
};

struct ConditionReport {
  std::string condition;  // C1|C2|C3|C4|C|e_prop|cesaro_e_prop|evc|cesaro_evc|...
  std::vector<EvidenceCell> grid;
  std::string verdict = "inconclusive";  // supported|refuted_at_confidence|inconclusive
  double proxy = 0.0;     // headline limsup/liminf/gap proxy
  double proxy_se = 0.0;
  double margin = 0.0;    // threshold the proxy is compared against
  bool has_witness = false;
  EvidenceCell witness;   // populated for refuted verdicts
  // Window metadata: the t-grid and the index where its trailing half starts.
  std::vector<double> t_grid;
  std::size_t trailing_from = 0;
  int n_traj = 0;
  std::uint64_t seed = 0;
  // Regularity probes: one (radius, |gap| proxy, std error) row per radius.
  std::vector<std::array<double, 3>> gap_curve;
  // Combined checks: named verdicts of attached cross-probes.
  std::vector<std::pair<std::string, std::string>> sub_verdicts;
  std::string notes;
};

struct ErgodicClassReport {
  std::vector<Point> representatives;
  std::vector<EmpiricalMeasure> limits;          // normalized Cesaro estimates
  std::vector<char> stable;                      // t vs t/2 within cluster_tol/2
  std::vector<std::vector<double>> distance;     // pairwise dual-Lipschitz
  std::vector<int> cluster_of;                   // class index per representative
  std::vector<std::vector<int>> clusters;        // members per class
  std::vector<char> ergodic_candidate;           // per class (see header notes)
  std::vector<std::vector<double>> support_gap;  // min inter-atom distance per class pair
  bool emds_violation = false;                   // ergodic candidates with touching supports
  std::vector<std::pair<int, int>> emds_pairs;
  double t = 0.0;
  double cluster_tol = 0.0;
  double support_eps = 0.0;
  int n_traj = 0;
  std::uint64_t seed = 0;
};

// Geometric time grid t0 * ratio^k, k = 0..n-1.
std::vector<double> geometric_grid(double t0, double ratio = 1.5, std::size_t n = 12);

// Ensemble estimate of Q_t f(x) = (1/t) int_0^t P_s f(x) ds: per-trajectory
// midpoint time average on kQtPanels panels, then mean +/- SE over n_traj.
CesaroEstimate estimate_Qt(const SemigroupModel& model, const TestFunction& f, const Point& x,
                           double t, int n_traj, std::uint64_t seed);

// Ensemble estimate of P_t f(x) from trajectory endpoints at time t.
CesaroEstimate estimate_Pt(const SemigroupModel& model, const TestFunction& f, const Point& x,
                           double t, int n_traj, std::uint64_t seed);

// Empirical occupation measure: states at n_time_samples stratified uniform
// times in [0, t] per trajectory, pooled over trajectories and normalized.
EmpiricalMeasure estimate_Qt_measure(const SemigroupModel& model, const Point& x, double t,
                                     int n_traj, int n_time_samples, std::uint64_t seed);

enum class LowerBoundCondition { C1, C2, C3, C4, C };
std::string to_string(LowerBoundCondition c);

// Lower-bound probes on ball/set masses:
//   C1: limsup_t Q_t(z, B(z,eps)) > 0                  (x grid ignored)
//   C2, C3: inf over x_grid of limsup_t Q_t(x, B(z,eps)) > 0
//   C4: inf over x_grid of liminf_t P_t(x, B(z,eps)) > 0
//   C:  inf over x_grid of limsup_t Q_t(x, K^eps) > 0  (K = given center set)
// z_or_K holds the single center z (C1-C4) or the finite set K (C).
ConditionReport probe_lower_bound(const SemigroupModel& model, LowerBoundCondition which,
                                  const std::vector<Point>& z_or_K, double eps,
                                  const std::vector<Point>& x_grid,
                                  const std::vector<double>& t_grid, int n_traj,
                                  std::uint64_t seed, double margin = 0.0);

enum class RegularityNotion { EProp, CesaroEProp, Evc, CesaroEvc };
std::string to_string(RegularityNotion n);

// Regularity probes: for each radius r the start x = sphere_point(z, r) is
// coupled with z (both consume the same substreams - common random numbers),
// and the f-gap |P_t f(x) - P_t f(z)| (or the Q_t version) is maximized over
// the full grid (sup_t notions) or its trailing half (limsup_t notions).
// Verdict from the smallest radius: supported when its gap + 3 SE <= tol,
// refuted when its gap - 3 SE > tol (the witness cell is attached).
ConditionReport probe_regularity(const SemigroupModel& model, RegularityNotion which,
                                 const Point& z, const TestFunction& f,
                                 const std::vector<double>& radii,
                                 const std::vector<double>& t_grid, int n_traj,
                                 std::uint64_t seed, double tol = 0.05);

// Empirical ergodic decomposition: Cesaro occupation estimates per start,
// stability check against t/2, single-linkage clustering of the pairwise
// dual-Lipschitz matrix at threshold cluster_tol, per-class-pair minimal
// inter-atom support distance, and an EMDS flag raised when two ergodic
// candidates (stable, not visibly a convex mixture of two other classes on a
// 0.05 weight grid) have supports closer than support_eps.
ErgodicClassReport ergodic_decomposition(const SemigroupModel& model,
                                         const std::vector<Point>& x_list, double t, int n_traj,
                                         double cluster_tol, std::uint64_t seed,
                                         int n_time_samples = kQtTimeSamples,
                                         double support_eps = 0.05);

// Weak-* mean ergodicity: pairwise collapse of Q_t f(x) across starts at the
// largest grid time, for every f in f_list; attaches cross-checks (C1-family
// lower bound at the anchor, Cesaro eventual continuity at the anchor, and a
// P_t-level convergence check over the trailing t-window) as sub-verdicts.
ConditionReport weak_star_mean_ergodicity_check(const SemigroupModel& model,
                                                const std::vector<Point>& x_list,
                                                const std::vector<TestFunction>& f_list,
                                                const std::vector<double>& t_grid, int n_traj,
                                                std::uint64_t seed, double tol = 0.05);

// Sweeping from a compact set: P_t(x, K^eps) trajectory fractions over the
// t-grid; supported when every start trends down with final mass <= 3 SE.
ConditionReport sweep_check(const SemigroupModel& model, const std::vector<Point>& K_centers,
                            double eps, const std::vector<Point>& x_list,
                            const std::vector<double>& t_grid, int n_traj, std::uint64_t seed);

// Serialization: full evidence grids plus seed/grids/n_traj/version metadata.
nlohmann::json report_to_json(const ConditionReport& report);
std::string report_to_csv(const ConditionReport& report);
nlohmann::json decomposition_to_json(const ErgodicClassReport& report, const MetricSpace& space);
std::string decomposition_to_csv(const ErgodicClassReport& report);

}  // namespace ergo
