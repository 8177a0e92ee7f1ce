#pragma once

// Countable-state Markov semigroups.
//
// Two engines:
//  * closed-form transition functions for the absorbing chain with slow modes
//    (states 0, 1/n and n for integers n >= 2; holding rate 1/n at both 1/n
//    and n; 1/n jumps to n, n jumps to 0, 0 is absorbing) -- unbounded jump
//    rates rule out naive uniformization, so this family is evaluated only
//    through its closed forms;
//  * uniformized integer-lattice chains P_t = sum_k e^{-t} t^k/k! P^k on a
//    finite window, with per-row truncation leak accounting and exact
//    Poisson-average weights for Cesaro averages.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ergo/empirical_measure.hpp"
#include "ergo/metric_space.hpp"
#include "ergo/test_function.hpp"

namespace ergo {

// --- closed-form chain -------------------------------------------------------

struct Example1State {
  enum class Kind { Zero, Reciprocal, Integer } kind;
  int n = 0;  // defined for Reciprocal (state 1/n) and Integer (state n)
};

// Classifies a state value; throws on values outside {0} u {1/n} u {n}.
Example1State example1_classify(double x);

// Transition probability p_{i,j}(t) between state values.
double example1_transition(double i, double j, double t);

// Full one-point marginal P_t(x, .) as a (at most 3 atom) measure.
EmpiricalMeasure example1_marginal(double x, double t);

double example1_pt_f(const TestFunction& f, double x, double t);

// Exact Cesaro average Q_n f(1/n) for f(x) = min(x, 1):
// (1/n)(1 - e^{-1}) + (1 - 2 e^{-1}).
double example1_q_exact(int n);

// Exact sup_{t >= t0} P_t f(1/n) for f(x) = min(x, 1); the map
// t -> (1/n + t/n) e^{-t/n} is decreasing past t = n - 1.
double example1_sup_gap_after(int n, double t0);

// --- uniformized integer-lattice chains --------------------------------------

class UniformizedChain {
 public:
  struct Entry {
    int to;
    double p;
  };

  struct MeasureResult {
    EmpiricalMeasure measure;  // atoms {state}; weights sum to 1 - deficit
    double deficit = 0.0;      // Poisson tail + accumulated window leak
    double leak = 0.0;         // window-leak component of the deficit
    double tol = 0.0;          // requested series tolerance
  };

  // rows: one-step transition lists per state; states outside [-window, window]
  // are truncated and accounted as leak.
  UniformizedChain(std::map<int, std::vector<Entry>> rows, int window);

  // The decomposition example on the integer lattice:
  //   0 absorbing; 1 <-> 3; even 2n -> 2n-2; odd 2n+1 (n >= 2) -> 0 w.p. 1/n
  //   else -> 1; negative -n -> -n-1 w.p. e^{-1/n^2} else -> 0.
  static UniformizedChain example2(int window = 200);

  static UniformizedChain from_json(const nlohmann::json& j);

  int window() const { return window_; }
  // One-step leak of a row (mass assigned outside the window).
  double leak_row(int state) const;
  // One application of P to a window-indexed weight vector.
  std::vector<double> step(const std::vector<double>& v) const;
  std::vector<double> unit_vector(int state) const;
  int index_of(int state) const;

  // P_t(from, .) truncated at series tolerance tol.
  MeasureResult transition(int from, double t, double tol) const;
  MeasureResult transition_from(const std::vector<double>& v, double t, double tol) const;
  // Q_t(from, .) with exact Poisson-average weights w_k(t) = P(N_t >= k+1)/t.
  MeasureResult cesaro(int from, double t, double tol) const;

  // sum_j P_t(from, j) f(j); low-biased by at most sup|f| * deficit.
  double pt_f(const TestFunction& f, int from, double t, double tol) const;

 private:
  MeasureResult weighted_series(const std::vector<double>& v0, double t, double tol,
                                bool cesaro_weights) const;

  std::vector<std::vector<Entry>> rows_;  // indexed by state + window
  std::vector<double> row_leak_;
  int window_;
};

// Serializes a measure result as flat CSV: state,weight,leak,tol.
std::string measure_result_csv(const UniformizedChain::MeasureResult& r);

// --- Cesaro averages ---------------------------------------------------------

enum class ChainScenario { Example1, Example2 };

// Q_t f(x) = (1/t) int_0^t P_s f(x) ds by adaptive Simpson to quad_tol.
double cesaro_exact(ChainScenario scenario, const TestFunction& f, double x, double t,
                    double quad_tol);

// Cesaro limit probe for the integer-lattice chain: Q_t(x,.) with a stability
// check against Q_{t/2}(x,.); negative starts are flagged as outside the
// tight regime (evidence: persistent leftward mass / window leak), the
// returned measure is then a diagnostic rather than a limit candidate.
struct Ex2LimitReport {
  UniformizedChain::MeasureResult limit;
  double stability_distance = 0.0;  // total-variation distance to Q_{t/2}
  bool stable = false;
  bool in_tight_regime = true;
  double negative_mass = 0.0;  // Q_t mass on states < 0
};

Ex2LimitReport ergodic_limit_ex2(int x, double t, double tol, double stability_tol = 0.02,
                                 int window = 200);

}  // namespace ergo
