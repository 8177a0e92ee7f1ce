#pragma once

// Piecewise-deterministic Markov processes driven by iterated function
// systems: a deterministic flow S(t) punctuated by Poisson(lambda) jump times;
// at each jump the pre-jump state xi picks map w_i with place-dependent
// probability p_i(xi) and restarts from w_i(xi).
//
// Sampling discipline: every trajectory draws its holding time and its map
// selection for jump k from dedicated counter-based substreams keyed by
// (seed, trajectory, k), so two trajectories with equal keys consume identical
// noise and coincide for as long as their states do.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ergo/metric_space.hpp"

namespace ergo {

struct IfsModel {
  std::string id;
  MetricSpace space = MetricSpace::euclidean(1);
  // S(t)(x); must satisfy d(S_t x, S_t y) <= e^{flow_growth * t} d(x, y).
  std::function<Point(double, const Point&)> flow;
  std::vector<std::function<Point(const Point&)>> maps;
  std::function<std::vector<double>(const Point&)> probs;
  double jump_rate = 1.0;   // lambda > 0
  double flow_growth = 0.0; // alpha

  // Optional one-point contraction data toward `anchor`.
  std::function<double(const Point&)> contraction;  // r(x)
  bool contraction_le_one = false;                  // enables branch pruning
  std::function<double(double)> modulus;            // omega, concave, omega(0)=0
  std::optional<Point> anchor;                      // z
  // Optional closed form for the n-step contraction envelope J_n(x).
  std::function<double(const Point&, int)> jn_closed_form;
};

struct IfsTrajectory {
  const IfsModel* model = nullptr;
  double horizon = 0.0;
  std::vector<double> jump_times;  // tau_0 = 0, tau_1, ... (within horizon)
  std::vector<Point> post_jump;    // Phi_0 = x0, Phi_1, ...
  std::vector<int> map_choice;     // chosen map per jump (size = jumps)

  // State at time t in [0, horizon]: S(t - tau_k)(Phi_k) for the last jump
  // tau_k <= t.
  Point state_at(double t) const;
};

IfsTrajectory simulate(const IfsModel& model, const Point& x0, double horizon, std::uint64_t seed,
                       std::uint64_t traj_index = 0);

// One row per jump: t, tau_index, state coordinates.
std::string trajectory_csv(const IfsTrajectory& traj);

// n-step contraction envelope J_n(x) = max over map words i of
// prod_{j=0}^{n-1} r(w_{i[j]}(x)), w_{i[j]} = w_{i_1} o ... o w_{i_j}.
// Uses the registered closed form when present; otherwise exact enumeration
// (n <= 12 and |maps|^n <= 4^12 enforced).
double jn_bound(const IfsModel& model, const Point& x, int n);
double jn_bound_enumerated(const IfsModel& model, const Point& x, int n);

// Summability check for the series sum_{n>=M} omega(J_n(x) d(x,z) (lambda/(lambda-alpha))^n)
// against the threshold 1 - gamma. Partial sum to n_max plus a geometric tail
// bound once the argument sequence decreases with ratio < 1. Requires
// lambda > alpha.
struct SeriesCheckResult {
  double partial_sum = 0.0;
  double tail_bound = 0.0;
  bool tail_converged = false;
  double total_bound = 0.0;
  double threshold = 0.0;  // 1 - gamma
  int terms_used = 0;
  std::string verdict;  // "holds" | "fails" | "inconclusive"
};

SeriesCheckResult b5_series_check(const IfsModel& model, const Point& x, int M, double gamma,
                                  int n_max);

// Report-only residual checks of the standing inequalities on sampled pairs.
//  A2: sum_i p_i(x) d(w_i x, w_i y) <= r d(x, y)        (pairwise contraction)
//  A3: sum_i |p_i(x) - p_i(y)|      <= omega(d(x, y))   (probability modulus)
//  A4: d(S_t x, S_t y)              <= e^{alpha t} d(x, y)
//  B2: sum_i p_i(x) d(w_i x, z)     <= r(x) d(x, z)     (one-leg contraction)
//  B3: sum_i |p_i(x) - p_i(z)|      <= omega(d(x, z))
//  B4: same as A4.
enum class IfsAssumption { A2, A3, A4, B2, B3, B4 };

struct AssumptionReport {
  IfsAssumption which;
  std::size_t n_pairs = 0;
  double max_residual = -std::numeric_limits<double>::infinity();  // LHS - RHS
  double max_ratio = 0.0;  // LHS / metric scale
  std::pair<Point, Point> worst_pair;
  bool satisfied_on_sample = false;
};

AssumptionReport check_assumptions(const IfsModel& model,
                                   const std::vector<std::pair<Point, Point>>& pairs,
                                   IfsAssumption which, double r_candidate = 1.0,
                                   const std::vector<double>& flow_times = {0.5, 1.0, 2.0});

// --- reciprocal-triple jump system: closed forms -----------------------------

// Closed-form lower bound for P(Phi_s^{1/n} = n): (1/2)(1/n) lambda s e^{-lambda s / n}.
double example3_jump_prob(int n, double lambda, double s);
// Exact law of the embedded symmetric two-state cycle {1/n, n} with rate-lambda
// jumps: P_s(1/n, {n}) = (e^{-lambda s/(2n)} - e^{-3 lambda s/(2n)}) / 2.
double example3_exact_jump_prob(int n, double lambda, double s);
double example3_exact_stay_prob(int n, double lambda, double s);
// Lower bound for the Cesaro occupation (1/n) int_0^n P(Phi_s = n) ds:
// (1/(2 lambda)) (1 - lambda e^{-lambda} - e^{-lambda}).
double example3_cesaro_bound(double lambda);
// Exact value of the same occupation average (independent of n):
// (1/lambda)(1 - e^{-lambda/2}) - (1/(3 lambda))(1 - e^{-3 lambda/2}).
double example3_exact_cesaro_occupation(double lambda);

// --- model registry -----------------------------------------------------------

// ids: ex3_jump_ifs, ex5_ifs_times_rotation, ex6_place_dependent,
//      ex7_ex6_times_rotation, bks_contractive
IfsModel make_ifs_model(const std::string& id, double lambda = 1.0);
std::vector<std::string> ifs_model_ids();

}  // namespace ergo
