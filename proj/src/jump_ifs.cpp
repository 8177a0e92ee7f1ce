#include "ergo/jump_ifs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ergo/rng.hpp"

namespace ergo {

Point IfsTrajectory::state_at(double t) const {
  if (t < 0.0 || t > horizon + 1e-12)
    throw std::invalid_argument("state_at: time outside simulated horizon");
  // jump_times is sorted with jump_times[0] = 0.
  auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - jump_times.begin()) - 1;
  return model->flow(t - jump_times[k], post_jump[k]);
}

IfsTrajectory simulate(const IfsModel& model, const Point& x0, double horizon, std::uint64_t seed,
                       std::uint64_t traj_index) {
  if (!(model.jump_rate > 0.0)) throw std::invalid_argument("simulate: jump_rate must be > 0");
  if (!(horizon >= 0.0)) throw std::invalid_argument("simulate: horizon must be >= 0");
  if (x0.size() != model.space.dimension())
    throw std::invalid_argument("simulate: x0 dimension mismatch");

  IfsTrajectory traj;
  traj.model = &model;
  traj.horizon = horizon;
  traj.jump_times.push_back(0.0);
  traj.post_jump.push_back(x0);

  double tau = 0.0;
  for (std::uint64_t k = 1;; ++k) {
    RngStream clock(seed, traj_index, 2 * k);
    const double dt = clock.exponential(model.jump_rate);
    if (tau + dt > horizon) break;
    tau += dt;
    const Point xi = model.flow(dt, traj.post_jump.back());
    for (double c : xi)
      if (!std::isfinite(c)) throw std::runtime_error("simulate: flow produced non-finite state");
    RngStream pick(seed, traj_index, 2 * k + 1);
    const auto p = model.probs(xi);
    if (p.size() != model.maps.size())
      throw std::runtime_error("simulate: probability vector size mismatch");
    double psum = 0.0;
    for (double w : p) psum += w;
    if (std::abs(psum - 1.0) > 1e-12)
      throw std::runtime_error("simulate: probability vector does not normalize at visited point");
    const std::size_t i = pick.categorical(p);
    traj.jump_times.push_back(tau);
    traj.post_jump.push_back(model.maps[i](xi));
    traj.map_choice.push_back(static_cast<int>(i));
  }
  return traj;
}

std::string trajectory_csv(const IfsTrajectory& traj) {
  std::ostringstream os;
  os.precision(17);
  os << "t,tau_index";
  for (std::size_t d = 0; d < traj.post_jump.front().size(); ++d) os << ",c" << d;
  os << "\n";
  for (std::size_t k = 0; k < traj.jump_times.size(); ++k) {
    os << traj.jump_times[k] << "," << k;
    for (double c : traj.post_jump[k]) os << "," << c;
    os << "\n";
  }
  return os.str();
}

namespace {

struct JnEnumerator {
  const IfsModel* m;
  int n;
  double best = 0.0;

  // DFS over map words; word[j] applied innermost-last, so the prefix value
  // w_{i[j]}(x) must be recomputed from the stored word each level.
  std::vector<int> word;

  double prefix_value_r(const Point& x, int depth) const {
    // r evaluated at w_{i_1}(w_{i_2}(...w_{i_depth}(x)))
    Point v = x;
    for (int j = depth - 1; j >= 0; --j) v = m->maps[static_cast<std::size_t>(word[j])](v);
    return m->contraction(v);
  }

  void dfs(const Point& x, int depth, double prod) {
    if (depth == n) {
      best = std::max(best, prod);
      return;
    }
    if (m->contraction_le_one && prod <= best) return;  // deeper factors only shrink
    for (std::size_t i = 0; i < m->maps.size(); ++i) {
      // Factor `depth` evaluates r at the composition of the first `depth`
      // chosen maps, newest innermost.
      word[static_cast<std::size_t>(depth - 1)] = static_cast<int>(i);
      const double r = prefix_value_r(x, depth);
      dfs(x, depth + 1, prod * r);
    }
  }
};

}  // namespace

double jn_bound_enumerated(const IfsModel& model, const Point& x, int n) {
  if (!model.contraction) throw std::invalid_argument("jn_bound: model has no contraction function");
  if (n < 1) throw std::invalid_argument("jn_bound: n must be >= 1");
  if (n > 12) throw std::invalid_argument("jn_bound: enumeration capped at n = 12");
  double words = 1.0;
  for (int j = 0; j < n; ++j) {
    words *= static_cast<double>(model.maps.size());
    if (words > 16777216.0) throw std::invalid_argument("jn_bound: word count exceeds 4^12");
  }
  JnEnumerator e{&model, n};
  e.word.assign(static_cast<std::size_t>(n), 0);
  // Factor 0 is r(x) itself; levels 1..n-1 multiply r at successive prefixes.
  e.dfs(x, 1, model.contraction(x));
  return e.best;
}

double jn_bound(const IfsModel& model, const Point& x, int n) {
  if (model.jn_closed_form) return model.jn_closed_form(x, n);
  return jn_bound_enumerated(model, x, n);
}

SeriesCheckResult b5_series_check(const IfsModel& model, const Point& x, int M, double gamma,
                                  int n_max) {
  if (!model.anchor) throw std::invalid_argument("b5_series_check: model has no anchor");
  if (!model.modulus) throw std::invalid_argument("b5_series_check: model has no modulus");
  if (!(model.jump_rate > model.flow_growth))
    throw std::invalid_argument("b5_series_check: requires jump_rate > flow_growth");
  if (M < 0 || n_max < M) throw std::invalid_argument("b5_series_check: need 0 <= M <= n_max");

  const double rho = model.space.distance(x, *model.anchor);
  const double q_rate = model.jump_rate / (model.jump_rate - model.flow_growth);

  SeriesCheckResult res;
  res.threshold = 1.0 - gamma;

  const int n_cap = model.jn_closed_form ? n_max : std::min(n_max, 12);
  std::vector<double> args;
  double qn = std::pow(q_rate, M);
  for (int n = M; n <= n_cap; ++n) {
    const double jn = n == 0 ? 1.0 : jn_bound(model, x, n);
    const double u = jn * rho * qn;
    args.push_back(u);
    res.partial_sum += model.modulus(u);
    qn *= q_rate;
    ++res.terms_used;
  }

  // Geometric tail once the argument sequence decreases with observed ratio < 1.
  if (args.size() >= 6) {
    double ratio = 0.0;
    bool decreasing = true;
    for (std::size_t k = args.size() - 5; k < args.size(); ++k) {
      if (args[k - 1] <= 0.0) {
        decreasing = args[k] <= 0.0;
        break;
      }
      const double r = args[k] / args[k - 1];
      ratio = std::max(ratio, r);
      if (r >= 1.0) decreasing = false;
    }
    if (decreasing && args.back() <= 0.0) {
      res.tail_converged = true;  // arguments hit zero exactly
    } else if (decreasing && ratio < 1.0) {
      double u = args.back();
      double tail = 0.0;
      bool converged = false;
      for (long k = 0; k < 1000000; ++k) {
        u *= ratio;
        const double term = model.modulus(u);
        tail += term;
        if (term < 1e-18 * std::max(1.0, res.partial_sum)) {
          converged = true;
          break;
        }
      }
      res.tail_converged = converged;
      res.tail_bound = tail;
    }
  }

  res.total_bound = res.partial_sum + res.tail_bound;
  if (res.tail_converged && res.total_bound < res.threshold)
    res.verdict = "holds";
  else if (res.partial_sum >= res.threshold)
    res.verdict = "fails";
  else
    res.verdict = "inconclusive";
  return res;
}

AssumptionReport check_assumptions(const IfsModel& model,
                                   const std::vector<std::pair<Point, Point>>& pairs,
                                   IfsAssumption which, double r_candidate,
                                   const std::vector<double>& flow_times) {
  if (pairs.empty()) throw std::invalid_argument("check_assumptions: no pairs");
  AssumptionReport rep;
  rep.which = which;
  rep.n_pairs = pairs.size();

  auto record = [&rep](double lhs, double rhs, double scale, const std::pair<Point, Point>& pr) {
    const double residual = lhs - rhs;
    if (residual > rep.max_residual) {
      rep.max_residual = residual;
      rep.worst_pair = pr;
    }
    if (scale > 0.0) rep.max_ratio = std::max(rep.max_ratio, lhs / scale);
  };

  for (const auto& pr : pairs) {
    const Point& x = pr.first;
    const Point& y = pr.second;
    switch (which) {
      case IfsAssumption::A2: {
        const auto p = model.probs(x);
        double lhs = 0.0;
        for (std::size_t i = 0; i < model.maps.size(); ++i)
          lhs += p[i] * model.space.distance(model.maps[i](x), model.maps[i](y));
        const double d = model.space.distance(x, y);
        record(lhs, r_candidate * d, d, pr);
        break;
      }
      case IfsAssumption::A3: {
        if (!model.modulus) throw std::invalid_argument("check_assumptions: A3 needs modulus");
        const auto px = model.probs(x);
        const auto py = model.probs(y);
        double lhs = 0.0;
        for (std::size_t i = 0; i < px.size(); ++i) lhs += std::abs(px[i] - py[i]);
        const double d = model.space.distance(x, y);
        record(lhs, model.modulus(d), d, pr);
        break;
      }
      case IfsAssumption::A4:
      case IfsAssumption::B4: {
        const double d = model.space.distance(x, y);
        for (double t : flow_times)
          record(model.space.distance(model.flow(t, x), model.flow(t, y)),
                 std::exp(model.flow_growth * t) * d, d, pr);
        break;
      }
      case IfsAssumption::B2: {
        if (!model.anchor || !model.contraction)
          throw std::invalid_argument("check_assumptions: B2 needs anchor and contraction");
        const auto p = model.probs(x);
        double lhs = 0.0;
        for (std::size_t i = 0; i < model.maps.size(); ++i)
          lhs += p[i] * model.space.distance(model.maps[i](x), *model.anchor);
        const double d = model.space.distance(x, *model.anchor);
        record(lhs, model.contraction(x) * d, d, pr);
        break;
      }
      case IfsAssumption::B3: {
        if (!model.anchor || !model.modulus)
          throw std::invalid_argument("check_assumptions: B3 needs anchor and modulus");
        const auto px = model.probs(x);
        const auto pz = model.probs(*model.anchor);
        double lhs = 0.0;
        for (std::size_t i = 0; i < px.size(); ++i) lhs += std::abs(px[i] - pz[i]);
        const double d = model.space.distance(x, *model.anchor);
        record(lhs, model.modulus(d), d, pr);
        break;
      }
    }
  }
  rep.satisfied_on_sample = rep.max_residual <= 1e-12;
  return rep;
}

// --- reciprocal-triple closed forms -------------------------------------------

double example3_jump_prob(int n, double lambda, double s) {
  if (n < 2) throw std::invalid_argument("example3_jump_prob: n >= 2 required");
  const double x = 1.0 / n;
  return 0.5 * x * lambda * s * std::exp(-x * lambda * s);
}

double example3_exact_jump_prob(int n, double lambda, double s) {
  if (n < 2) throw std::invalid_argument("example3_exact_jump_prob: n >= 2 required");
  const double a = lambda * s / (2.0 * n);
  return 0.5 * (std::exp(-a) - std::exp(-3.0 * a));
}

double example3_exact_stay_prob(int n, double lambda, double s) {
  if (n < 2) throw std::invalid_argument("example3_exact_stay_prob: n >= 2 required");
  const double a = lambda * s / (2.0 * n);
  return 0.5 * (std::exp(-a) + std::exp(-3.0 * a));
}

double example3_cesaro_bound(double lambda) {
  return (1.0 - lambda * std::exp(-lambda) - std::exp(-lambda)) / (2.0 * lambda);
}

double example3_exact_cesaro_occupation(double lambda) {
  return (1.0 - std::exp(-lambda / 2.0)) / lambda -
         (1.0 - std::exp(-1.5 * lambda)) / (3.0 * lambda);
}

// --- model registry ------------------------------------------------------------

namespace {

std::vector<double> reciprocal_triple_probs(double x) {
  if (x < 0.0) throw std::invalid_argument("reciprocal triple: negative state");
  if (x < 2.0 / 3.0) return {x / 2.0, 1.0 - x, x / 2.0};
  if (x <= 1.5) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  return {1.0 / (2.0 * x), 1.0 - 1.0 / x, 1.0 / (2.0 * x)};
}

IfsModel reciprocal_triple(double lambda) {
  IfsModel m;
  m.id = "ex3_jump_ifs";
  m.space = MetricSpace::euclidean(1);
  m.flow = [](double, const Point& x) { return x; };
  m.maps = {
      [](const Point&) -> Point { return {0.0}; },
      [](const Point& x) -> Point { return x; },
      [](const Point& x) -> Point { return {x[0] != 0.0 ? 1.0 / x[0] : 0.0}; },
  };
  m.probs = [](const Point& x) { return reciprocal_triple_probs(x[0]); };
  m.jump_rate = lambda;
  m.flow_growth = 0.0;
  m.anchor = Point{0.0};
  // One-leg envelope toward 0 on the lower regime: r(x) = 1 - x + 1/(2x).
  m.contraction = [](const Point& x) {
    return x[0] > 0.0 ? 1.0 - x[0] + 1.0 / (2.0 * x[0]) : 1.0;
  };
  m.contraction_le_one = false;
  m.modulus = [](double u) { return 2.0 * u; };
  return m;
}

IfsModel halving_pair(double lambda) {
  IfsModel m;
  m.id = "ex6_place_dependent";
  m.space = MetricSpace::euclidean(1);
  m.flow = [](double, const Point& x) { return x; };
  m.maps = {
      [](const Point& x) -> Point { return {x[0] / 2.0}; },
      [](const Point& x) -> Point { return x; },
  };
  m.probs = [](const Point& x) {
    const double p1 = std::exp(-x[0]);
    return std::vector<double>{p1, 1.0 - p1};
  };
  m.jump_rate = lambda;
  m.flow_growth = 0.0;
  m.anchor = Point{0.0};
  m.contraction = [](const Point& x) { return 1.0 - std::exp(-x[0]) / 2.0; };
  m.contraction_le_one = true;
  m.modulus = [](double u) { return 2.0 * u; };
  m.jn_closed_form = [](const Point& x, int n) {
    return std::pow(1.0 - std::exp(-x[0]) / 2.0, n);
  };
  return m;
}

// Radial model x rotation: the flow advances the angle, jumps act radially.
IfsModel times_rotation(IfsModel radial, const std::string& id) {
  IfsModel m;
  m.id = id;
  m.space = MetricSpace::product(radial.space, MetricSpace::torus());
  auto rflow = radial.flow;
  m.flow = [rflow](double t, const Point& p) {
    Point out = rflow(t, Point{p[0]});
    out.push_back(wrap_angle(p[1] + t));
    return out;
  };
  for (const auto& w : radial.maps) {
    m.maps.push_back([w](const Point& p) {
      Point out = w(Point{p[0]});
      out.push_back(p[1]);
      return out;
    });
  }
  auto rprobs = radial.probs;
  m.probs = [rprobs](const Point& p) { return rprobs(Point{p[0]}); };
  m.jump_rate = radial.jump_rate;
  m.flow_growth = 0.0;  // rotation is an isometry; max metric keeps the bound
  if (radial.anchor) m.anchor = Point{(*radial.anchor)[0], 0.0};
  auto rcon = radial.contraction;
  if (rcon) m.contraction = [rcon](const Point& p) { return rcon(Point{p[0]}); };
  m.contraction_le_one = radial.contraction_le_one;
  m.modulus = radial.modulus;
  return m;
}

IfsModel contractive_pair(double lambda) {
  IfsModel m;
  m.id = "bks_contractive";
  m.space = MetricSpace::euclidean(1);
  m.flow = [](double, const Point& x) { return x; };
  m.maps = {
      [](const Point& x) -> Point { return {x[0] / 2.0}; },
      [](const Point& x) -> Point { return {(x[0] + 1.0) / 2.0}; },
  };
  m.probs = [](const Point&) { return std::vector<double>{0.5, 0.5}; };
  m.jump_rate = lambda;
  m.flow_growth = 0.0;
  m.modulus = [](double u) { return u; };  // probabilities are constant
  return m;
}

}  // namespace

IfsModel make_ifs_model(const std::string& id, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("make_ifs_model: lambda must be > 0");
  if (id == "ex3_jump_ifs") return reciprocal_triple(lambda);
  if (id == "ex5_ifs_times_rotation")
    return times_rotation(reciprocal_triple(lambda), "ex5_ifs_times_rotation");
  if (id == "ex6_place_dependent") return halving_pair(lambda);
  if (id == "ex7_ex6_times_rotation")
    return times_rotation(halving_pair(lambda), "ex7_ex6_times_rotation");
  if (id == "bks_contractive") return contractive_pair(lambda);
  throw std::invalid_argument("make_ifs_model: unknown id '" + id + "'");
}

std::vector<std::string> ifs_model_ids() {
  return {"ex3_jump_ifs", "ex5_ifs_times_rotation", "ex6_place_dependent",
          "ex7_ex6_times_rotation", "bks_contractive"};
}

}  // namespace ergo
