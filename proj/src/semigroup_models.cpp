#include "ergo/semigroup_models.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <stdexcept>
#include <utility>

#include "ergo/countable_chain.hpp"
#include "ergo/jump_ifs.hpp"
#include "ergo/rng.hpp"
#include "ergo/sde.hpp"

namespace ergo {
namespace {

// Rejects overrides the scenario does not declare; errors carry field paths.
class Params {
 public:
  explicit Params(const nlohmann::json& j) : j_(j) {
    if (!j_.is_null() && !j_.is_object())
      throw std::invalid_argument("params: expected an object");
  }
  double number(const std::string& key, double fallback) {
    used_.insert(key);
    if (j_.is_null() || !j_.contains(key)) return fallback;
    if (!j_.at(key).is_number())
      throw std::invalid_argument("params." + key + ": expected a number");
    return j_.at(key).get<double>();
  }
  void finish(const std::string& id) const {
    if (j_.is_null()) return;
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key))
        throw std::invalid_argument("params." + key + ": unknown parameter for model '" + id +
                                    "'");
  }

 private:
  const nlohmann::json& j_;
  std::set<std::string> used_;
};

void require_dim(const Point& x, std::size_t dim, const std::string& id) {
  if (x.size() != dim)
    throw std::invalid_argument(id + ": start point has dimension " + std::to_string(x.size()) +
                                ", expected " + std::to_string(dim));
}

std::vector<TestFunction> scalar_dictionary(const Point& anchor, const MetricSpace& space) {
  return {normalized(make_clipped_distance(anchor, 1.0, space)),
          normalized(make_bump_function(anchor, 0.5, 1.0, space)),
          normalized(make_coordinate_clamp(0, -2.0, 2.0))};
}

Point shift_first(const Point& z, double r) {
  Point x = z;
  x[0] += r;
  return x;
}

// --- absorbing chain with slow modes (states 0, 1/n, n) ----------------------

SemigroupModel make_ex1(Params& p) {
  SemigroupModel m;
  m.id = "ex1_chain";
  m.space = MetricSpace::euclidean(1);
  m.anchor = {0.0};
  m.default_x_grid = {{0.0}, {0.5}, {2.0}, {0.2}, {5.0}};
  m.tight_region = {{0.0}};
  m.sphere_point = shift_first;  // valid only when z + r classifies as a state
  m.f_dictionary = scalar_dictionary(m.anchor, m.space);
  m.sampler = [](const Point& x0, double /*horizon*/, std::uint64_t seed, std::uint64_t traj) {
    require_dim(x0, 1, "ex1_chain");
    const Example1State s = example1_classify(x0[0]);
    double first = 0.0, second = 0.0, mid = 0.0, start = x0[0];
    if (s.kind != Example1State::Kind::Zero) {
      const double rate = 1.0 / s.n;
      first = RngStream(seed, traj, 0).exponential(rate);
      if (s.kind == Example1State::Kind::Reciprocal) {
        second = RngStream(seed, traj, 1).exponential(rate);
        mid = static_cast<double>(s.n);
      }
    }
    return [=](double t) -> Point {
      if (t < 0.0) throw std::out_of_range("ex1_chain: negative query time");
      if (t < first) return {start};
      if (t < first + second) return {mid};
      return {0.0};
    };
  };
  m.exact_marginal = [](const Point& x0, double t) {
    require_dim(x0, 1, "ex1_chain");
    return example1_marginal(x0[0], t);
  };
  p.finish(m.id);
  return m;
}

// --- integer-lattice chain with several ergodic classes ----------------------

int ex2_move(int state, double u) {
  if (state == 0) return 0;
  if (state == 1) return 3;
  if (state == 3) return 1;
  if (state > 0 && state % 2 == 0) return state - 2;
  if (state > 0) {  // odd 2n+1, n >= 2
    const int n = (state - 1) / 2;
    return u < 1.0 / n ? 0 : 1;
  }
  const int n = -state;
  return u < std::exp(-1.0 / (static_cast<double>(n) * n)) ? state - 1 : 0;
}

SemigroupModel make_ex2(Params& p) {
  const int window = static_cast<int>(p.number("window", 200));
  if (window < 8) throw std::invalid_argument("params.window: must be >= 8");
  SemigroupModel m;
  m.id = "ex2_decomposition";
  m.space = MetricSpace::countable();
  m.anchor = {0.0};
  m.default_x_grid = {{0.0}, {1.0}, {3.0}, {5.0}, {7.0}};
  m.tight_region = {{0.0}, {1.0}, {3.0}, {5.0}, {7.0}};
  m.sphere_point = shift_first;
  m.f_dictionary = {normalized(make_clipped_distance(m.anchor, 1.0, m.space)),
                    normalized(make_bump_function(m.anchor, 0.25, 0.75, m.space)),
                    normalized(make_bump_function({1.0}, 0.25, 0.75, m.space))};
  m.sampler = [](const Point& x0, double horizon, std::uint64_t seed, std::uint64_t traj) {
    require_dim(x0, 1, "ex2_decomposition");
    const double rounded = std::nearbyint(x0[0]);
    if (std::abs(x0[0] - rounded) > 1e-9)
      throw std::invalid_argument("ex2_decomposition: start must be an integer state");
    int state = static_cast<int>(rounded);
    RngStream clocks(seed, traj, 0);
    RngStream moves(seed, traj, 1);
    auto times = std::make_shared<std::vector<double>>(1, 0.0);
    auto states = std::make_shared<std::vector<double>>(1, static_cast<double>(state));
    double t = 0.0;
    while (true) {  // unit-rate jump clock; the embedded chain does the moves
      t += clocks.exponential(1.0);
      if (t > horizon) break;
      state = ex2_move(state, moves.uniform01());
      times->push_back(t);
      states->push_back(static_cast<double>(state));
    }
    const double T = horizon;
    return [times, states, T](double s) -> Point {
      if (s < 0.0 || s > T) throw std::out_of_range("ex2_decomposition: query outside horizon");
      const auto it = std::upper_bound(times->begin(), times->end(), s);
      return {(*states)[static_cast<std::size_t>(it - times->begin()) - 1]};
    };
  };
  m.exact_marginal = [window](const Point& x0, double t) {
    require_dim(x0, 1, "ex2_decomposition");
    static thread_local std::unique_ptr<UniformizedChain> chain;
    static thread_local int chain_window = 0;
    if (!chain || chain_window != window) {
      chain = std::make_unique<UniformizedChain>(UniformizedChain::example2(window));
      chain_window = window;
    }
    auto measure = chain->transition(static_cast<int>(std::nearbyint(x0[0])), t, 1e-10).measure;
    measure.normalize();
    return measure;
  };
  p.finish(m.id);
  return m;
}

// --- deterministic rotation on the circle ------------------------------------

SemigroupModel make_rotation(Params& p) {
  const double omega = p.number("omega", 1.0);
  SemigroupModel m;
  m.id = "torus_rotation";
  m.space = MetricSpace::torus();
  m.anchor = {0.0};
  m.default_x_grid = {{0.0}, {1.0}, {3.0}};
  m.tight_region = {{0.0}, {3.0}};
  m.sphere_point = [](const Point& z, double r) -> Point { return {wrap_angle(z[0] + r)}; };
  TestFunction c;
  c.eval = [](const Point& x) { return std::cos(x[0]); };
  c.sup_bound = 1.0;
  c.lip_constant = 1.0;
  c.name = "cos";
  TestFunction s;
  s.eval = [](const Point& x) { return std::sin(x[0]); };
  s.sup_bound = 1.0;
  s.lip_constant = 1.0;
  s.name = "sin";
  m.f_dictionary = {normalized(make_bump_function(m.anchor, 0.5, 1.0, m.space)), normalized(c),
                    normalized(s)};
  m.sampler = [omega](const Point& x0, double /*horizon*/, std::uint64_t /*seed*/,
                      std::uint64_t /*traj*/) {
    require_dim(x0, 1, "torus_rotation");
    const double theta0 = x0[0];
    return [theta0, omega](double t) -> Point { return {wrap_angle(theta0 + omega * t)}; };
  };
  m.exact_marginal = [omega](const Point& x0, double t) {
    require_dim(x0, 1, "torus_rotation");
    return EmpiricalMeasure::dirac({wrap_angle(x0[0] + omega * t)});
  };
  p.finish(m.id);
  return m;
}

// --- jump IFS families --------------------------------------------------------

SemigroupModel make_ifs(const std::string& id, Params& p) {
  const double lambda = p.number("lambda", 1.0);
  auto model = std::make_shared<IfsModel>(make_ifs_model(id, lambda));
  SemigroupModel m;
  m.id = id;
  m.space = model->space;
  const bool with_angle = model->space.dimension() == 2;
  m.anchor = with_angle ? Point{0.0, 0.0} : Point{0.0};
  if (id == "bks_contractive") {
    m.default_x_grid = {{0.0}, {0.5}, {1.0}};
    m.tight_region = {{0.0}, {0.5}, {1.0}};
  } else if (with_angle) {
    m.default_x_grid = {{0.5, 0.0}, {1.0, 1.0}, {2.0, 3.0}};
    m.tight_region = {{0.0, 0.0}};
  } else {
    m.default_x_grid = {{0.5}, {1.0}, {5.0}};
    m.tight_region = {{0.0}};
  }
  m.sphere_point = shift_first;  // radial direction on product spaces
  m.f_dictionary = scalar_dictionary(m.anchor, m.space);
  m.sampler = [model](const Point& x0, double horizon, std::uint64_t seed, std::uint64_t traj) {
    auto path = std::make_shared<IfsTrajectory>(simulate(*model, x0, horizon, seed, traj));
    return [path](double t) -> Point { return path->state_at(t); };
  };
  if (id == "ex3_jump_ifs") {
    m.exact_marginal = [lambda](const Point& x0, double t) {
      require_dim(x0, 1, "ex3_jump_ifs");
      const Example1State s = example1_classify(x0[0]);  // same state set {0, 1/n, n}
      if (s.kind == Example1State::Kind::Zero) return EmpiricalMeasure::dirac({0.0});
      const double stay = example3_exact_stay_prob(s.n, lambda, t);
      const double jump = example3_exact_jump_prob(s.n, lambda, t);
      const double other =
          s.kind == Example1State::Kind::Reciprocal ? static_cast<double>(s.n) : 1.0 / s.n;
      EmpiricalMeasure out;
      out.add({x0[0]}, stay);
      out.add({other}, jump);
      if (1.0 - stay - jump > 0.0) out.add({0.0}, 1.0 - stay - jump);
      return out;
    };
  }
  p.finish(id);
  return m;
}

// --- single random-amplitude mode ---------------------------------------------

SemigroupModel make_hopf(Params& p) {
  const double a = p.number("a", 1.0);
  const double b = p.number("b", 0.5);
  const double im_f = p.number("im_f", std::sqrt(2.0));
  const double h = p.number("h", 0.02);
  if (!(h > 0.0)) throw std::invalid_argument("params.h: must be > 0");
  SemigroupModel m;
  m.id = "hopf_mode";
  m.space = MetricSpace::euclidean(2);
  m.anchor = {0.0, 0.0};
  m.default_x_grid = {{1.0, 0.0}, {0.0, 0.0}, {1e-3, 0.0}};
  m.tight_region = {{0.0, 0.0}, {1.0, 0.0}};
  m.sphere_point = shift_first;
  m.f_dictionary = scalar_dictionary(m.anchor, m.space);
  m.sampler = [a, b, im_f, h](const Point& x0, double horizon, std::uint64_t seed,
                              std::uint64_t traj) {
    require_dim(x0, 2, "hopf_mode");
    HopfMode mode;
    mode.a = a;
    mode.b = b;
    mode.im_f = im_f;
    mode.r0 = std::hypot(x0[0], x0[1]);
    mode.theta0 = mode.r0 > 0.0 ? wrap_angle(std::atan2(x0[1], x0[0])) : 0.0;
    auto grid = std::make_shared<BrownianGrid>(
        BrownianGrid::make(horizon, h, seed, traj, 0, 0x486f7066 /* radial path tag */));
    auto radial = std::make_shared<std::vector<double>>(hopf_radial_path(mode, *grid));
    const double step = grid->h;
    const std::size_t last = radial->size() - 1;
    // State queries snap to the nearest grid time (error O(step) in time).
    return [radial, mode, step, last](double t) -> Point {
      if (t < 0.0) throw std::out_of_range("hopf_mode: negative query time");
      const std::size_t k =
          std::min(last, static_cast<std::size_t>(std::llround(t / std::max(step, 1e-300))));
      const double r = (*radial)[k];
      const double theta = hopf_angle(mode.theta0, mode.im_f, t);
      return {r * std::cos(theta), r * std::sin(theta)};
    };
  };
  p.finish(m.id);
  return m;
}

// --- dissipative three-dimensional system --------------------------------------

SemigroupModel make_lorenz(Params& p) {
  LorenzState base;
  base.sigma = p.number("sigma", base.sigma);
  base.beta = p.number("beta", base.beta);
  base.rho = p.number("rho", base.rho);
  base.alpha_hat = p.number("alpha_hat", base.alpha_hat);
  const double h = p.number("h", 0.005);
  validate_lorenz(base);
  SemigroupModel m;
  m.id = "lorenz";
  m.space = MetricSpace::euclidean(3);
  m.anchor = {0.0, 0.0, 0.0};
  m.default_x_grid = {{0.0, 0.0, 0.0}, {0.0, 0.0, 3.0}, {1.0, 2.0, 0.0}};
  m.tight_region = {{0.0, 0.0, 0.0}};
  m.sphere_point = shift_first;
  m.f_dictionary = scalar_dictionary(m.anchor, m.space);
  m.sampler = [base, h](const Point& x0, double horizon, std::uint64_t seed, std::uint64_t traj) {
    require_dim(x0, 3, "lorenz");
    LorenzState init = base;
    init.x = x0[0];
    init.y = x0[1];
    init.z = x0[2];
    auto path = std::make_shared<LorenzPath>(lorenz_simulate(init, horizon, h, seed, traj));
    const std::size_t last = path->t.size() - 1;
    const double step = path->h;
    return [path, last, step](double t) -> Point {
      if (t < 0.0) throw std::out_of_range("lorenz: negative query time");
      const std::size_t k =
          std::min(last, static_cast<std::size_t>(std::llround(t / std::max(step, 1e-300))));
      return {path->x[k], path->y[k], path->z[k]};
    };
  };
  p.finish(m.id);
  return m;
}

// --- deterministic escape to infinity ------------------------------------------

SemigroupModel make_drift(Params& p) {
  SemigroupModel m;
  m.id = "drift_to_infinity";
  m.space = MetricSpace::euclidean(1);
  m.anchor = {0.0};
  m.default_x_grid = {{0.0}, {10.0}};
  m.sphere_point = shift_first;
  m.f_dictionary = scalar_dictionary(m.anchor, m.space);
  m.sampler = [](const Point& x0, double /*horizon*/, std::uint64_t /*seed*/,
                 std::uint64_t /*traj*/) {
    require_dim(x0, 1, "drift_to_infinity");
    const double start = x0[0];
    return [start](double t) -> Point { return {start + t}; };
  };
  m.exact_marginal = [](const Point& x0, double t) {
    require_dim(x0, 1, "drift_to_infinity");
    return EmpiricalMeasure::dirac({x0[0] + t});
  };
  p.finish(m.id);
  return m;
}

}  // namespace

SemigroupModel make_model(const std::string& id, const nlohmann::json& params) {
  Params p(params);
  if (id == "ex1_chain") return make_ex1(p);
  if (id == "ex2_decomposition") return make_ex2(p);
  if (id == "torus_rotation") return make_rotation(p);
  if (id == "ex3_jump_ifs" || id == "ex5_ifs_times_rotation" || id == "ex6_place_dependent" ||
      id == "ex7_ex6_times_rotation" || id == "bks_contractive")
    return make_ifs(id, p);
  if (id == "hopf_mode") return make_hopf(p);
  if (id == "lorenz") return make_lorenz(p);
  if (id == "drift_to_infinity") return make_drift(p);
  std::string known;
  for (const auto& k : model_ids()) known += (known.empty() ? "" : ", ") + k;
  throw std::invalid_argument("make_model: unknown id '" + id + "' (known: " + known + ")");
}

std::vector<std::string> model_ids() {
  return {"ex1_chain",           "ex2_decomposition",      "torus_rotation",
          "ex3_jump_ifs",        "ex5_ifs_times_rotation", "ex6_place_dependent",
          "ex7_ex6_times_rotation", "bks_contractive",     "hopf_mode",
          "lorenz",              "drift_to_infinity"};
}

}  // namespace ergo
