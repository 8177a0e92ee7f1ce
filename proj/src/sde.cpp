#include "ergo/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ergo/rng.hpp"

namespace ergo {

namespace {

constexpr std::uint64_t kTagHopfBrownian = 0x486f7066;  // per-(traj, mode) paths
constexpr std::uint64_t kTagHopfTime = 0x74696d65;      // Cesaro time stratification
constexpr std::uint64_t kTagLambda = 0x6c616d62;        // invariant-radius sampler
constexpr std::uint64_t kTagLorenz = 0x4c6f725a;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(1 + e^y), stable across the double range.
double softplus(double y) {
  if (y == kNegInf) return 0.0;
  if (y > 36.0) return y + std::exp(-y);
  if (y < -36.0) return std::exp(y);
  return std::log1p(std::exp(y));
}

// log(e^x + e^y).
double lse(double x, double y) {
  if (x == kNegInf) return y;
  if (y == kNegInf) return x;
  const double m = std::max(x, y);
  return m + softplus(std::min(x, y) - m);
}

// log of int_0^step exp(y0 + (y1 - y0) s / step) ds, the exact integral of an
// exponent that is linear across the panel: step * e^{y0} * (e^D - 1) / D with
// D = y1 - y0. expm1 keeps the ratio stable for small |D|; the asymptotic
// branches cover |D| beyond the expm1 range.
double log_exp_panel(double step, double y0, double y1) {
  const double d = y1 - y0;
  double log_ratio;  // log((e^D - 1) / D)
  if (d == 0.0)
    log_ratio = 0.0;
  else if (d > 700.0)
    log_ratio = d - std::log(d);
  else if (d < -700.0)
    log_ratio = -std::log(-d);
  else
    log_ratio = std::log(std::expm1(d) / d);
  return std::log(step) + y0 + log_ratio;
}

}  // namespace

BrownianGrid BrownianGrid::make(double T, double h_target, std::uint64_t seed, std::uint64_t id0,
                                std::uint64_t id1, std::uint64_t id2) {
  if (!(T >= 0.0)) throw std::invalid_argument("BrownianGrid: horizon must be >= 0");
  if (!(h_target > 0.0)) throw std::invalid_argument("BrownianGrid: step must be > 0");
  BrownianGrid g;
  if (T == 0.0) {
    g.h = h_target;
    g.times = {0.0};
    g.path = {0.0};
    return g;
  }
  const auto K = static_cast<std::size_t>(std::ceil(T / h_target - 1e-9));
  g.h = T / static_cast<double>(std::max<std::size_t>(K, 1));
  const std::size_t steps = std::max<std::size_t>(K, 1);
  g.times.resize(steps + 1);
  g.path.resize(steps + 1);
  g.increments.resize(steps);
  g.times[0] = 0.0;
  g.path[0] = 0.0;
  RngStream stream(seed, id0, id1, id2);
  const double sqrt_h = std::sqrt(g.h);
  for (std::size_t k = 0; k < steps; ++k) {
    g.increments[k] = sqrt_h * stream.normal();
    g.times[k + 1] = (k + 1 == steps) ? T : g.h * static_cast<double>(k + 1);
    g.path[k + 1] = g.path[k] + g.increments[k];
  }
  return g;
}

std::vector<double> hopf_radial_path(const HopfMode& mode, const BrownianGrid& grid) {
  if (mode.r0 < 0.0) throw std::invalid_argument("hopf_radial_path: r0 must be >= 0");
  const std::size_t n = grid.path.size();
  std::vector<double> r(n, 0.0);
  if (mode.r0 == 0.0) return r;

  const double log_r0 = std::log(mode.r0);
  const double log_2r0sq = std::log(2.0) + 2.0 * log_r0;
  double log_integral = kNegInf;
  double prev_exponent = 0.0;  // 2(a t + b B) at t = 0
  for (std::size_t k = 0; k < n; ++k) {
    const double e_k = mode.a * grid.times[k] + mode.b * grid.path[k];
    if (k > 0) {
      const double step = grid.times[k] - grid.times[k - 1];
      log_integral = lse(log_integral, log_exp_panel(step, prev_exponent, 2.0 * e_k));
    }
    prev_exponent = 2.0 * e_k;
    const double log_r = log_r0 + e_k - 0.5 * softplus(log_2r0sq + log_integral);
    if (!std::isfinite(log_r) && log_r != kNegInf)
      throw std::runtime_error("hopf_radial_path: non-finite exponent");
    r[k] = std::exp(log_r);
  }
  return r;
}

std::vector<double> hopf_radial_em(const HopfMode& mode, const BrownianGrid& grid) {
  std::vector<double> r(grid.path.size(), 0.0);
  r[0] = mode.r0;
  const double drift = mode.a + 0.5 * mode.b * mode.b;
  for (std::size_t k = 0; k + 1 < grid.path.size(); ++k) {
    const double step = grid.times[k + 1] - grid.times[k];
    const double v = r[k];
    const double next = v + step * (drift * v - v * v * v) + mode.b * v * grid.increments[k];
    r[k + 1] = std::max(next, 0.0);
  }
  return r;
}

double hopf_lambda_sample(double a, double b, double tol, std::uint64_t seed,
                          std::uint64_t sample_index) {
  if (a < 0.0) throw std::invalid_argument("hopf_lambda_sample: a must be >= 0");
  if (a == 0.0) return 0.0;  // invariant law collapses to the origin
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("hopf_lambda_sample: tol in (0,1)");

  const double block_len = 10.0 / std::max(a, 1.0);
  const auto steps_per_block = static_cast<std::size_t>(std::ceil(block_len / 0.01));
  const double h = block_len / static_cast<double>(steps_per_block);
  const double sqrt_h = std::sqrt(h);

  RngStream stream(seed, kTagLambda, sample_index);
  double s = 0.0, w = 0.0;
  double prev_phi = 0.0;  // exponent -2 a s + 2 b W(s) at s = 0
  double log_integral = kNegInf;
  std::size_t blocks_done = 0;
  std::size_t blocks_this_round = 1;
  const std::size_t kBlockCap = 1024;
  while (true) {
    const double before = log_integral;
    for (std::size_t blk = 0; blk < blocks_this_round; ++blk) {
      for (std::size_t k = 0; k < steps_per_block; ++k) {
        s += h;
        w += sqrt_h * stream.normal();
        const double phi = -2.0 * a * s + 2.0 * b * w;
        log_integral = lse(log_integral, log_exp_panel(h, prev_phi, phi));
        prev_phi = phi;
      }
    }
    blocks_done += blocks_this_round;
    if (before != kNegInf) {
      const double rel_increment = 1.0 - std::exp(before - log_integral);
      if (rel_increment < tol) break;
    }
    if (blocks_done >= kBlockCap)
      throw std::runtime_error("hopf_lambda_sample: no convergence within the block cap");
    blocks_this_round = std::min(2 * blocks_this_round, kBlockCap - blocks_done);
  }
  return std::exp(-0.5 * (std::log(2.0) + log_integral));
}

double hopf_angle(double theta0, double im_f, double t) {
  return wrap_angle(theta0 + im_f * t);
}

double quasiperiodic_average(const std::function<double(const std::vector<double>&)>& g,
                             const std::vector<double>& theta0, const std::vector<double>& omega,
                             double T, int n_panels) {
  if (theta0.size() != omega.size())
    throw std::invalid_argument("quasiperiodic_average: dimension mismatch");
  if (!(T > 0.0) || n_panels < 1)
    throw std::invalid_argument("quasiperiodic_average: need T > 0 and n_panels >= 1");
  const double h = T / n_panels;
  std::vector<double> theta(theta0.size());
  double acc = 0.0;
  for (int k = 0; k <= n_panels; ++k) {
    const double s = h * k;
    for (std::size_t d = 0; d < theta.size(); ++d)
      theta[d] = wrap_angle(theta0[d] + omega[d] * s);
    const double weight = (k == 0 || k == n_panels) ? 0.5 : 1.0;
    acc += weight * g(theta);
  }
  return acc * h / T;
}

double torus_average(const std::function<double(const std::vector<double>&)>& g, int dim,
                     int n_per_dim) {
  if (dim < 1 || n_per_dim < 1) throw std::invalid_argument("torus_average: bad grid");
  double cells = 1.0;
  for (int d = 0; d < dim; ++d) {
    cells *= n_per_dim;
    if (cells > 16777216.0) throw std::invalid_argument("torus_average: grid too large");
  }
  const double step = 2.0 * std::numbers::pi / n_per_dim;
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  std::vector<double> theta(static_cast<std::size_t>(dim));
  double acc = 0.0;
  long count = 0;
  while (true) {
    for (int d = 0; d < dim; ++d) theta[static_cast<std::size_t>(d)] = (idx[static_cast<std::size_t>(d)] + 0.5) * step;
    acc += g(theta);
    ++count;
    int d = 0;
    while (d < dim && ++idx[static_cast<std::size_t>(d)] == n_per_dim) {
      idx[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d == dim) break;
  }
  return acc / static_cast<double>(count);
}

Point hopf_state(const std::vector<HopfMode>& modes, const std::vector<BrownianGrid>& grids,
                 double t) {
  if (modes.size() != grids.size()) throw std::invalid_argument("hopf_state: mismatched mode set");
  Point state;
  state.reserve(2 * modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const auto& grid = grids[m];
    const auto it = std::lower_bound(grid.times.begin(), grid.times.end(), t - 1e-9);
    if (it == grid.times.end() || std::abs(*it - t) > 1e-6)
      throw std::invalid_argument("hopf_state: time not on the Brownian grid");
    const auto k = static_cast<std::size_t>(it - grid.times.begin());
    const double r = hopf_radial_path(modes[m], grid)[k];
    const double theta = hopf_angle(modes[m].theta0, modes[m].im_f, grid.times[k]);
    state.push_back(r * std::cos(theta));
    state.push_back(r * std::sin(theta));
  }
  return state;
}

double hopf_l2_norm(const Point& state) {
  double sq = 0.0;
  for (double c : state) sq += c * c;
  return std::sqrt(sq);
}

bool hopf_in_x0(const std::vector<HopfMode>& modes) {
  for (const auto& m : modes)
    if (!(m.r0 > 0.0)) return false;
  return true;
}

namespace {

EmpiricalMeasure assemble_impl(const std::vector<HopfMode>& modes, double t, double h, int n_traj,
                               std::uint64_t seed, bool cesaro) {
  if (modes.empty()) throw std::invalid_argument("hopf_assemble: no modes");
  if (n_traj < 1) throw std::invalid_argument("hopf_assemble: n_traj >= 1");
  if (!(t >= 0.0)) throw std::invalid_argument("hopf_assemble: t >= 0");
  EmpiricalMeasure out;
  for (int j = 0; j < n_traj; ++j) {
    double sample_time = t;
    if (cesaro) {
      RngStream ts(seed, static_cast<std::uint64_t>(j), 0, kTagHopfTime);
      sample_time = t * (static_cast<double>(j) + ts.uniform01()) / static_cast<double>(n_traj);
    }
    std::vector<BrownianGrid> grids;
    grids.reserve(modes.size());
    for (std::size_t m = 0; m < modes.size(); ++m)
      grids.push_back(BrownianGrid::make(sample_time, h, seed, static_cast<std::uint64_t>(j), m,
                                         kTagHopfBrownian));
    out.add(hopf_state(modes, grids, sample_time), 1.0);
  }
  return out;
}

}  // namespace

EmpiricalMeasure hopf_assemble(const std::vector<HopfMode>& modes, double t, double h, int n_traj,
                               std::uint64_t seed) {
  return assemble_impl(modes, t, h, n_traj, seed, false);
}

EmpiricalMeasure hopf_assemble_cesaro(const std::vector<HopfMode>& modes, double t, double h,
                                      int n_traj, std::uint64_t seed) {
  return assemble_impl(modes, t, h, n_traj, seed, true);
}

HopfPhasePoint hopf_phase_classify(double nu, double c, int n_tilde) {
  if (!(c > 0.0)) throw std::invalid_argument("hopf_phase_classify: c must be > 0");
  if (n_tilde < 1) throw std::invalid_argument("hopf_phase_classify: n_tilde >= 1");
  if (!(nu >= 0.0)) throw std::invalid_argument("hopf_phase_classify: nu must be >= 0");
  HopfPhasePoint p;
  p.nu = nu;
  for (int n = -n_tilde; n <= n_tilde; ++n) {
    if (n == 0) continue;  // a_0 = 0: never active
    if (c - nu * n * n > 0.0) p.active_modes.push_back(n);
  }
  p.support_dim = static_cast<int>(p.active_modes.size());
  return p;
}

std::vector<HopfPhasePoint> hopf_phase_sweep(const std::vector<double>& nus, double c,
                                             int n_tilde) {
  std::vector<HopfPhasePoint> out;
  out.reserve(nus.size());
  for (double nu : nus) out.push_back(hopf_phase_classify(nu, c, n_tilde));
  return out;
}

std::string hopf_phase_sweep_json(const std::vector<HopfPhasePoint>& sweep) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : sweep)
    arr.push_back({{"nu", p.nu}, {"active_modes", p.active_modes}, {"support_dim", p.support_dim}});
  return arr.dump(2);
}

void validate_lorenz(const LorenzState& s) {
  if (!(s.sigma > 0.0 && s.beta > 0.0 && s.alpha_hat > 0.0))
    throw std::invalid_argument("lorenz: sigma, beta, alpha_hat must be > 0");
  if (!(s.rho < 1.0)) throw std::invalid_argument("lorenz: rho must be < 1");
  if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z))
    throw std::invalid_argument("lorenz: non-finite initial state");
}

LorenzPath lorenz_simulate(const LorenzState& init, double T, double h, std::uint64_t seed,
                           std::uint64_t traj_index) {
  // Weaker than the scenario-load invariant: the integrator itself accepts a
  // noiseless system (alpha_hat = 0) for deterministic cross-checks.
  if (!(init.sigma > 0.0 && init.beta > 0.0 && init.alpha_hat >= 0.0))
    throw std::invalid_argument("lorenz_simulate: sigma, beta > 0 and alpha_hat >= 0");
  if (!(init.rho < 1.0)) throw std::invalid_argument("lorenz_simulate: rho must be < 1");
  if (!std::isfinite(init.x) || !std::isfinite(init.y) || !std::isfinite(init.z))
    throw std::invalid_argument("lorenz_simulate: non-finite initial state");
  if (!(T > 0.0) || !(h > 0.0)) throw std::invalid_argument("lorenz_simulate: T, h > 0");
  if (h * std::max({init.sigma, init.beta, std::abs(init.rho)}) >= 0.1)
    throw std::invalid_argument("lorenz_simulate: step too large for the drift scale");

  const auto K = static_cast<std::size_t>(std::ceil(T / h - 1e-9));
  const double step = T / static_cast<double>(K);
  const double sqrt_step = std::sqrt(step);
  LorenzPath path;
  path.h = step;
  path.t.resize(K + 1);
  path.x.resize(K + 1);
  path.y.resize(K + 1);
  path.z.resize(K + 1);
  path.t[0] = 0.0;
  path.x[0] = init.x;
  path.y[0] = init.y;
  path.z[0] = init.z;
  RngStream noise(seed, kTagLorenz, traj_index);
  for (std::size_t k = 0; k < K; ++k) {
    const double x = path.x[k], y = path.y[k], z = path.z[k];
    path.x[k + 1] = x + step * init.sigma * (y - x);
    path.y[k + 1] = y + step * (x * (init.rho - z) - y);
    path.z[k + 1] = z - step * (init.beta * z + x * y) + init.alpha_hat * sqrt_step * noise.normal();
    path.t[k + 1] = (k + 1 == K) ? T : step * static_cast<double>(k + 1);
    if (!std::isfinite(path.x[k + 1]) || !std::isfinite(path.y[k + 1]) ||
        !std::isfinite(path.z[k + 1]))
      throw std::runtime_error("lorenz_simulate: blow-up at step " + std::to_string(k + 1));
  }
  return path;
}

std::string lorenz_csv(const LorenzPath& path) {
  std::ostringstream os;
  os.precision(17);
  os << "t,X,Y,Z\n";
  for (std::size_t k = 0; k < path.t.size(); ++k)
    os << path.t[k] << "," << path.x[k] << "," << path.y[k] << "," << path.z[k] << "\n";
  return os.str();
}

std::string hopf_mode_csv(const HopfMode& mode, const BrownianGrid& grid) {
  const auto r = hopf_radial_path(mode, grid);
  std::ostringstream os;
  os.precision(17);
  os << "t,r,theta\n";
  for (std::size_t k = 0; k < grid.times.size(); ++k)
    os << grid.times[k] << "," << r[k] << "," << hopf_angle(mode.theta0, mode.im_f, grid.times[k])
       << "\n";
  return os.str();
}

}  // namespace ergo
