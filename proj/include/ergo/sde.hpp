#pragma once

// Spectral Hopf dynamics and the stochastic Lorenz system.
//
// Each Hopf mode n carries an independent radial SDE
//   dr = (a + b^2/2) r dt - r^3 dt + b r dB
// whose solution is known in closed form; we evaluate that closed form on a
// sampled Brownian grid rather than discretizing the SDE. The denominator
// integral of exp(2 a s + 2 b B(s)) uses panels that treat the exponent as
// linear between grid nodes, which integrates each panel in closed form; for
// b = 0 the exponent really is linear, so the noiseless path is exact to
// floating-point rounding.
// Exponents a t + b B(t) routinely exceed the double range before T = 50, so
// every exponential lives in log space and integrals accumulate by
// log-sum-exp.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ergo/empirical_measure.hpp"
#include "ergo/metric_space.hpp"

namespace ergo {

// Brownian increments on a uniform grid covering [0, T]. The step is the
// largest value <= h_target that divides T into an integer number of panels.
struct BrownianGrid {
  double h = 0.0;
  std::vector<double> times;       // t_0 = 0 .. t_K = T
  std::vector<double> increments;  // K values ~ N(0, h)
  std::vector<double> path;        // K+1 values, path[0] = 0

  static BrownianGrid make(double T, double h_target, std::uint64_t seed, std::uint64_t id0 = 0,
                           std::uint64_t id1 = 0, std::uint64_t id2 = 0);
};

struct HopfMode {
  int index = 0;       // spectral index n
  double a = 0.0;      // drift coefficient a_n
  double b = 0.0;      // noise coefficient b_n
  double im_f = 0.0;   // angular frequency Im F_n
  double r0 = 0.0;     // initial radius, >= 0
  double theta0 = 0.0; // initial angle, wrapped into [0, 2pi)
};

// Closed-form radial path evaluated at every grid point:
//   r(t) = r0 e^{a t + b B(t)} / (1 + 2 r0^2 int_0^t e^{2 a s + 2 b B(s)} ds)^{1/2}.
// Strictly positive whenever r0 > 0; identically zero for r0 = 0.
std::vector<double> hopf_radial_path(const HopfMode& mode, const BrownianGrid& grid);

// Euler-Maruyama integration of the radial SDE on the same grid; used as an
// independent cross-check of the closed form (strong order 1/2).
std::vector<double> hopf_radial_em(const HopfMode& mode, const BrownianGrid& grid);

// One sample of the invariant radius lambda = (2 int_{-infty}^0 e^{2at + 2b bhat(t)} dt)^{-1/2}
// for a > 0; returns 0 for a = 0 (the invariant law is delta_0). The backward
// path extends in blocks of length 10/max(a,1), doubling the block count per
// round until the round's relative increment drops below tol (hard cap 1024
// blocks).
double hopf_lambda_sample(double a, double b, double tol, std::uint64_t seed,
                          std::uint64_t sample_index = 0);

// Exact angular rotation theta0 + im_f * t, reduced mod 2pi.
double hopf_angle(double theta0, double im_f, double t);

// Time average (1/T) int_0^T g(theta0 + omega s) ds by the trapezoid rule,
// with each coordinate wrapped into [0, 2pi) before evaluating g.
double quasiperiodic_average(const std::function<double(const std::vector<double>&)>& g,
                             const std::vector<double>& theta0, const std::vector<double>& omega,
                             double T, int n_panels);

// Flat average over the d-torus by a midpoint tensor grid with n_per_dim
// points per coordinate.
double torus_average(const std::function<double(const std::vector<double>&)>& g, int dim,
                     int n_per_dim);

// Truncated spectral state at time t: coordinates (Re w_n, Im w_n) for the
// modes in declaration order, with w_n = r_n e^{i theta_n}.
Point hopf_state(const std::vector<HopfMode>& modes, const std::vector<BrownianGrid>& grids,
                 double t);

// l^2 norm of an assembled state (Euclidean norm of the Re/Im coordinates).
double hopf_l2_norm(const Point& state);

// Membership in the nondegenerate set: every declared mode starts with r0 > 0.
bool hopf_in_x0(const std::vector<HopfMode>& modes);

// Ensemble of spectral states at fixed time t (one Brownian substream per
// (trajectory, mode) pair), as an empirical measure on R^{2 * #modes}.
EmpiricalMeasure hopf_assemble(const std::vector<HopfMode>& modes, double t, double h,
                               int n_traj, std::uint64_t seed);

// Same ensemble but sampled at a stratified uniform time in [0, t] per
// trajectory: an unbiased estimate of the Cesaro-averaged law.
EmpiricalMeasure hopf_assemble_cesaro(const std::vector<HopfMode>& modes, double t, double h,
                                      int n_traj, std::uint64_t seed);

// Viscosity phase classification with drift a_n = -nu n^2 + c for 0 < |n| <= n_tilde
// (a_0 = 0 and |n| > n_tilde are never active). A mode is active when a_n > 0
// strictly; boundary modes a_n = 0 count as inactive. support_dim is the
// number of active modes (each contributes one circle to the support torus of
// the nontrivial ergodic measure).
struct HopfPhasePoint {
  double nu = 0.0;
  std::vector<int> active_modes;  // signed indices, ascending
  int support_dim = 0;
};

HopfPhasePoint hopf_phase_classify(double nu, double c, int n_tilde);
std::vector<HopfPhasePoint> hopf_phase_sweep(const std::vector<double>& nus, double c,
                                             int n_tilde);
std::string hopf_phase_sweep_json(const std::vector<HopfPhasePoint>& sweep);

// --- stochastic Lorenz system ---------------------------------------------

struct LorenzState {
  double x = 0.0, y = 0.0, z = 0.0;
  double sigma = 10.0, beta = 8.0 / 3.0, rho = 0.5, alpha_hat = 1.0;
};

// Standing parameter assumptions: sigma, beta, alpha_hat > 0 and rho < 1.
void validate_lorenz(const LorenzState& s);

struct LorenzPath {
  double h = 0.0;
  std::vector<double> t, x, y, z;
};

// Euler-Maruyama path of
//   dX = sigma (Y - X) dt, dY = (X (rho - Z) - Y) dt, dZ = -(beta Z + X Y) dt + alpha_hat dW.
// Noise acts on Z only; from X = Y = 0 both coordinates stay exactly 0.
LorenzPath lorenz_simulate(const LorenzState& init, double T, double h, std::uint64_t seed,
                           std::uint64_t traj_index = 0);

std::string lorenz_csv(const LorenzPath& path);

// CSV dump of one radial/angular mode path: t, r, theta.
std::string hopf_mode_csv(const HopfMode& mode, const BrownianGrid& grid);

}  // namespace ergo
