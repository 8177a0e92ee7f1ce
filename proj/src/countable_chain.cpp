#include "ergo/countable_chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ergo/quadrature.hpp"

namespace ergo {

// --- closed-form chain -------------------------------------------------------

Example1State example1_classify(double x) {
  if (x == 0.0) return {Example1State::Kind::Zero, 0};
  if (x >= 1.5) {
    const double r = std::round(x);
    if (std::abs(x - r) < 1e-9 && r >= 2.0)
      return {Example1State::Kind::Integer, static_cast<int>(r)};
  } else if (x > 0.0 && x <= 0.5 + 1e-9) {
    const double inv = 1.0 / x;
    const double r = std::round(inv);
    if (std::abs(inv - r) < 1e-6 && r >= 2.0)
      return {Example1State::Kind::Reciprocal, static_cast<int>(r)};
  }
  throw std::invalid_argument("example1: invalid state value");
}

double example1_transition(double i, double j, double t) {
  if (t < 0.0) throw std::invalid_argument("example1_transition: t must be >= 0");
  const auto si = example1_classify(i);
  const auto sj = example1_classify(j);
  using K = Example1State::Kind;
  switch (si.kind) {
    case K::Zero:
      return sj.kind == K::Zero ? 1.0 : 0.0;
    case K::Reciprocal: {
      const double n = si.n;
      if (sj.kind == K::Reciprocal && sj.n == si.n) return std::exp(-t / n);
      if (sj.kind == K::Integer && sj.n == si.n) return (t / n) * std::exp(-t / n);
      if (sj.kind == K::Zero) return 1.0 - std::exp(-t / n) - (t / n) * std::exp(-t / n);
      return 0.0;
    }
    case K::Integer: {
      const double n = si.n;
      if (sj.kind == K::Integer && sj.n == si.n) return std::exp(-t / n);
      if (sj.kind == K::Zero) return 1.0 - std::exp(-t / n);
      return 0.0;
    }
  }
  return 0.0;
}

EmpiricalMeasure example1_marginal(double x, double t) {
  const auto s = example1_classify(x);
  using K = Example1State::Kind;
  EmpiricalMeasure m;
  switch (s.kind) {
    case K::Zero:
      m.add({0.0}, 1.0);
      break;
    case K::Reciprocal: {
      const double n = s.n;
      const double stay = std::exp(-t / n);
      const double up = (t / n) * std::exp(-t / n);
      const double absorbed = 1.0 - stay - up;
      if (stay > 0.0) m.add({1.0 / n}, stay);
      if (up > 0.0) m.add({n}, up);
      if (absorbed > 0.0) m.add({0.0}, absorbed);
      break;
    }
    case K::Integer: {
      const double n = s.n;
      const double stay = std::exp(-t / n);
      if (stay > 0.0) m.add({n}, stay);
      if (1.0 - stay > 0.0) m.add({0.0}, 1.0 - stay);
      break;
    }
  }
  return m;
}

double example1_pt_f(const TestFunction& f, double x, double t) {
  const auto m = example1_marginal(x, t);
  double s = 0.0;
  for (const auto& a : m.atoms()) s += a.weight * f(a.point);
  return s;
}

double example1_q_exact(int n) {
  if (n < 2) throw std::invalid_argument("example1_q_exact: n >= 2 required");
  const double e1 = std::exp(-1.0);
  return (1.0 / n) * (1.0 - e1) + (1.0 - 2.0 * e1);
}

double example1_sup_gap_after(int n, double t0) {
  if (n < 2) throw std::invalid_argument("example1_sup_gap_after: n >= 2 required");
  auto g = [n](double t) { return ((1.0 + t) / n) * std::exp(-t / n); };
  const double t_peak = n - 1.0;
  return t0 >= t_peak ? g(t0) : g(t_peak);
}

// --- uniformized chains ------------------------------------------------------

UniformizedChain::UniformizedChain(std::map<int, std::vector<Entry>> rows, int window)
    : window_(window) {
  if (window <= 0) throw std::invalid_argument("UniformizedChain: window must be > 0");
  const std::size_t n = 2 * static_cast<std::size_t>(window) + 1;
  rows_.assign(n, {});
  row_leak_.assign(n, 0.0);
  for (auto& [state, entries] : rows) {
    if (state < -window || state > window) continue;
    const std::size_t idx = static_cast<std::size_t>(state + window);
    double in_window = 0.0, total = 0.0;
    for (const auto& e : entries) {
      if (!(e.p >= 0.0)) throw std::invalid_argument("UniformizedChain: negative probability");
      total += e.p;
      if (e.to >= -window && e.to <= window) {
        rows_[idx].push_back(e);
        in_window += e.p;
      }
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("UniformizedChain: row does not sum to 1");
    row_leak_[idx] = total - in_window;
  }
  // States without a declared row default to absorbing.
  for (int s = -window; s <= window; ++s) {
    auto& row = rows_[static_cast<std::size_t>(s + window)];
    if (row.empty() && row_leak_[static_cast<std::size_t>(s + window)] == 0.0)
      row.push_back({s, 1.0});
  }
}

UniformizedChain UniformizedChain::example2(int window) {
  std::map<int, std::vector<Entry>> rows;
  for (int s = -window; s <= window; ++s) {
    if (s == 0) {
      rows[s] = {{0, 1.0}};
    } else if (s == 1) {
      rows[s] = {{3, 1.0}};
    } else if (s == 3) {
      rows[s] = {{1, 1.0}};
    } else if (s > 0 && s % 2 == 0) {
      rows[s] = {{s - 2, 1.0}};
    } else if (s > 0) {  // odd >= 5
      const double n = (s - 1) / 2;
      rows[s] = {{0, 1.0 / n}, {1, 1.0 - 1.0 / n}};
    } else {  // s < 0: descend w.p. e^{-1/n^2}, absorb at 0 otherwise
      const double n = -s;
      const double down = std::exp(-1.0 / (n * n));
      rows[s] = {{s - 1, down}, {0, 1.0 - down}};
    }
  }
  return UniformizedChain(std::move(rows), window);
}

UniformizedChain UniformizedChain::from_json(const nlohmann::json& j) {
  const int window = j.at("window").get<int>();
  std::map<int, std::vector<Entry>> rows;
  for (const auto& row : j.at("rows")) {
    const int from = row.at("from").get<int>();
    std::vector<Entry> entries;
    for (const auto& e : row.at("to")) entries.push_back({e.at(0).get<int>(), e.at(1).get<double>()});
    rows[from] = std::move(entries);
  }
  return UniformizedChain(std::move(rows), window);
}

double UniformizedChain::leak_row(int state) const {
  return row_leak_.at(static_cast<std::size_t>(index_of(state)));
}

int UniformizedChain::index_of(int state) const {
  if (state < -window_ || state > window_)
    throw std::invalid_argument("UniformizedChain: state outside window");
  return state + window_;
}

std::vector<double> UniformizedChain::unit_vector(int state) const {
  std::vector<double> v(rows_.size(), 0.0);
  v[static_cast<std::size_t>(index_of(state))] = 1.0;
  return v;
}

std::vector<double> UniformizedChain::step(const std::vector<double>& v) const {
  if (v.size() != rows_.size()) throw std::invalid_argument("step: vector size mismatch");
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    for (const auto& e : rows_[i])
      out[static_cast<std::size_t>(e.to + window_)] += v[i] * e.p;
  }
  return out;
}

namespace {

// log of the Poisson(t) pmf at k; stable for large t.
double log_pois(double t, std::size_t k) {
  if (t == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -t + static_cast<double>(k) * std::log(t) - std::lgamma(static_cast<double>(k) + 1.0);
}

}  // namespace

UniformizedChain::MeasureResult UniformizedChain::weighted_series(const std::vector<double>& v0,
                                                                  double t, double tol,
                                                                  bool cesaro_weights) const {
  if (!(t >= 0.0)) throw std::invalid_argument("weighted_series: t must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("weighted_series: tol must be > 0");

  std::vector<double> acc(v0.size(), 0.0);
  std::vector<double> v = v0;

  // Poisson pmf and survival bookkeeping. Weights: pmf_k for the transition
  // semigroup; P(N_t >= k+1)/t for the Cesaro average (these sum to exactly 1
  // over k >= 0 since E[N_t] = t).
  double cdf = 0.0;          // sum of pmf_0..pmf_k
  double weight_sum = 0.0;   // sum of applied weights
  const std::size_t k_cap = static_cast<std::size_t>(t + 60.0 * std::sqrt(t + 1.0) + 1000.0);

  for (std::size_t k = 0; k <= k_cap; ++k) {
    const double pmf = std::exp(log_pois(t, k));
    double w;
    if (cesaro_weights) {
      if (t == 0.0) {
        w = k == 0 ? 1.0 : 0.0;  // Q_0 = identity
      } else {
        const double survival = std::max(0.0, 1.0 - cdf);  // P(N_t >= k) before adding pmf_k
        // w_k = P(N_t >= k+1)/t
        w = std::max(0.0, survival - pmf) / t;
      }
    } else {
      w = pmf;
    }
    if (w > 0.0)
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * v[i];
    weight_sum += w;
    cdf += pmf;
    if (weight_sum >= 1.0 - tol) break;
    v = step(v);
  }

  MeasureResult res;
  res.tol = tol;
  double mass = 0.0;
  for (double x : acc) mass += x;
  res.deficit = std::max(0.0, 1.0 - mass);
  res.leak = std::max(0.0, weight_sum - mass);  // applied weight that left the window
  for (std::size_t i = 0; i < acc.size(); ++i)
    if (acc[i] > 0.0) res.measure.add({static_cast<double>(static_cast<int>(i) - window_)}, acc[i]);
  return res;
}

UniformizedChain::MeasureResult UniformizedChain::transition(int from, double t, double tol) const {
  return weighted_series(unit_vector(from), t, tol, false);
}

UniformizedChain::MeasureResult UniformizedChain::transition_from(const std::vector<double>& v,
                                                                  double t, double tol) const {
  return weighted_series(v, t, tol, false);
}

UniformizedChain::MeasureResult UniformizedChain::cesaro(int from, double t, double tol) const {
  return weighted_series(unit_vector(from), t, tol, true);
}

double UniformizedChain::pt_f(const TestFunction& f, int from, double t, double tol) const {
  const auto res = transition(from, t, tol);
  double s = 0.0;
  for (const auto& a : res.measure.atoms()) s += a.weight * f(a.point);
  return s;
}

std::string measure_result_csv(const UniformizedChain::MeasureResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << "state,weight,leak,tol\n";
  for (const auto& a : r.measure.atoms())
    os << static_cast<long long>(a.point[0]) << "," << a.weight << "," << r.leak << "," << r.tol
       << "\n";
  return os.str();
}

// --- Cesaro averages ---------------------------------------------------------

double cesaro_exact(ChainScenario scenario, const TestFunction& f, double x, double t,
                    double quad_tol) {
  if (!(t > 0.0)) throw std::invalid_argument("cesaro_exact: t must be > 0");
  std::function<double(double)> integrand;
  if (scenario == ChainScenario::Example1) {
    integrand = [&f, x](double s) { return example1_pt_f(f, x, s); };
  } else {
    // Series tolerance well below the quadrature tolerance per unit time.
    const double inner = std::min(1e-10, quad_tol / (10.0 * std::max(t, 1.0)));
    const auto chain = UniformizedChain::example2();
    const int from = static_cast<int>(std::llround(x));
    integrand = [chain, from, &f, inner](double s) { return chain.pt_f(f, from, s, inner); };
  }
  return adaptive_simpson(integrand, 0.0, t, quad_tol * t) / t;
}

Ex2LimitReport ergodic_limit_ex2(int x, double t, double tol, double stability_tol, int window) {
  const auto chain = UniformizedChain::example2(window);
  Ex2LimitReport rep;
  rep.limit = chain.cesaro(x, t, tol);
  const auto half = chain.cesaro(x, t / 2.0, tol);

  // Total variation on the window plus the deficit mismatch.
  std::map<long long, double> wa, wb;
  for (const auto& a : rep.limit.measure.atoms()) wa[std::llround(a.point[0])] = a.weight;
  for (const auto& a : half.measure.atoms()) wb[std::llround(a.point[0])] = a.weight;
  double tv = std::abs(rep.limit.deficit - half.deficit);
  for (const auto& [s, w] : wa) tv += std::abs(w - (wb.count(s) ? wb.at(s) : 0.0));
  for (const auto& [s, w] : wb)
    if (!wa.count(s)) tv += w;
  rep.stability_distance = 0.5 * tv;
  rep.stable = rep.stability_distance < stability_tol;
  rep.in_tight_regime = x >= 0;
  for (const auto& a : rep.limit.measure.atoms())
    if (a.point[0] < 0.0) rep.negative_mass += a.weight;
  return rep;
}

}  // namespace ergo
