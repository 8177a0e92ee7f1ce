#pragma once

// Uniform trajectory-sampler contract over every process family in the
// toolkit, so the ergodicity probes can run model-generically.
//
// A SemigroupModel bundles a state space, a seeded trajectory sampler
// (returning a state-at-time query valid on [0, horizon]), an optional exact
// marginal, and scenario metadata the probes rely on: a probe grid of starting
// points, an anchor, a sphere-point rule (the scenario-supplied direction used
// by regularity probes), and a dictionary of normalized test functions.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ergo/empirical_measure.hpp"
#include "ergo/metric_space.hpp"
#include "ergo/test_function.hpp"

namespace ergo {

struct SemigroupModel {
  // State of one realized trajectory at a time in [0, horizon].
  using StateAt = std::function<Point(double)>;

  std::string id;
  MetricSpace space = MetricSpace::euclidean(1);

  // Same (x0, horizon, seed, traj) always yields the identical trajectory.
  std::function<StateAt(const Point& x0, double horizon, std::uint64_t seed, std::uint64_t traj)>
      sampler;

  // Exact one-point marginal P_t(x0, .), when the family has a closed form /
  // convergent series; empty otherwise. May throw for starts it cannot handle.
  std::function<EmpiricalMeasure(const Point& x0, double t)> exact_marginal;

  Point anchor;  // reference point for balls / test functions
  // Point at distance r from z along the scenario's probing direction.
  std::function<Point(const Point& z, double r)> sphere_point;
  std::vector<Point> default_x_grid;   // scenario-declared probe starts
  std::vector<TestFunction> f_dictionary;  // each normalized to ||f||_L <= 1
  std::vector<Point> tight_region;     // representatives of the declared tight set
};

// Builds a registered model; `params` overrides scenario defaults (unknown
// keys are rejected with their field path). Known ids:
//   ex1_chain             absorbing chain with slow modes (states 0, 1/n, n)
//   ex2_decomposition     integer-lattice chain with several ergodic classes
//   torus_rotation        deterministic unit-speed rotation on the circle
//   ex3_jump_ifs          reciprocal-triple jump IFS on [0, infinity)
//   ex5_ifs_times_rotation   the same IFS producted with a circle rotation
//   ex6_place_dependent   halving-pair IFS with place-dependent weights
//   ex7_ex6_times_rotation   halving pair producted with a circle rotation
//   bks_contractive       contractive pair x/2, (x+1)/2 on [0, 1]
//   hopf_mode             one complex mode with random radial amplitude
//   lorenz                three-dimensional dissipative system, noise on Z
//   drift_to_infinity     deterministic x(t) = x + t on the line
SemigroupModel make_model(const std::string& id, const nlohmann::json& params = {});

std::vector<std::string> model_ids();

}  // namespace ergo
