#include "ergo/dual_lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

namespace ergo {

namespace {

constexpr double kMassEps = 1e-14;

// Dense successive-shortest-path min-cost transport on a complete bipartite
// graph. Supplies and demands are positive with equal totals; costs >= 0.
double min_cost_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                          const std::vector<std::vector<double>>& cost) {
  const std::size_t ns = supply.size(), nt = demand.size();
  const std::size_t n = ns + nt;
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> rs = supply, rd = demand;
  std::vector<std::vector<double>> flow(ns, std::vector<double>(nt, 0.0));
  std::vector<double> phi(n, 0.0);  // node potentials; reduced costs stay >= 0

  // Terminate when either side is exhausted down to fp residue; the dropped
  // mass is <= (ns + nt) * kMassEps, far below the optimizer's tolerance.
  auto has_residual = [](const std::vector<double>& v) {
    for (double x : v)
      if (x > kMassEps) return true;
    return false;
  };

  while (has_residual(rs) && has_residual(rd)) {
    std::vector<double> dist(n, inf);
    std::vector<int> prev(n, -1);
    std::vector<char> done(n, 0);
    for (std::size_t i = 0; i < ns; ++i)
      if (rs[i] > kMassEps) dist[i] = 0.0;

    for (;;) {
      int u = -1;
      double du = inf;
      for (std::size_t k = 0; k < n; ++k)
        if (!done[k] && dist[k] < du) {
          du = dist[k];
          u = static_cast<int>(k);
        }
      if (u < 0) break;
      done[u] = 1;
      if (u < static_cast<int>(ns)) {
        for (std::size_t j = 0; j < nt; ++j) {
          const double rc = std::max(0.0, cost[u][j] + phi[u] - phi[ns + j]);
          if (du + rc < dist[ns + j]) {
            dist[ns + j] = du + rc;
            prev[ns + j] = u;
          }
        }
      } else {
        const std::size_t j = static_cast<std::size_t>(u) - ns;
        for (std::size_t i = 0; i < ns; ++i) {
          if (flow[i][j] > kMassEps) {
            const double rc = std::max(0.0, -(cost[i][j] + phi[i] - phi[ns + j]));
            if (du + rc < dist[i]) {
              dist[i] = du + rc;
              prev[i] = u;
            }
          }
        }
      }
    }

    int target = -1;
    double td = inf;
    for (std::size_t j = 0; j < nt; ++j)
      if (rd[j] > kMassEps && dist[ns + j] < td) {
        td = dist[ns + j];
        target = static_cast<int>(ns + j);
      }
    if (target < 0) throw std::runtime_error("min_cost_transport: no augmenting path");

    // Bottleneck: backward arcs are capped by their current flow; the path
    // start is a source with remaining supply, the end a sink with demand.
    double amt = rd[target - static_cast<int>(ns)];
    int v = target;
    while (prev[v] >= 0) {
      const int u = prev[v];
      if (u >= static_cast<int>(ns) && v < static_cast<int>(ns))
        amt = std::min(amt, flow[v][u - static_cast<int>(ns)]);
      v = u;
    }
    amt = std::min(amt, rs[v]);

    int w = target;
    while (prev[w] >= 0) {
      const int u = prev[w];
      if (u < static_cast<int>(ns))
        flow[u][w - static_cast<int>(ns)] += amt;
      else
        flow[w][u - static_cast<int>(ns)] -= amt;
      w = u;
    }
    rs[v] -= amt;
    rd[target - static_cast<int>(ns)] -= amt;

    for (std::size_t k = 0; k < n; ++k)
      if (dist[k] < inf) phi[k] += std::min(dist[k], td);
  }

  double total = 0.0;
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nt; ++j) total += flow[i][j] * cost[i][j];
  return total;
}

struct SignedSupport {
  std::vector<Point> points;
  std::vector<double> delta;  // mu - nu weights, sums to ~0
};

SignedSupport merged_difference(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  std::map<std::vector<double>, double> acc;
  for (const auto& a : mu.atoms()) acc[a.point] += a.weight / mu.total_weight();
  for (const auto& a : nu.atoms()) acc[a.point] -= a.weight / nu.total_weight();
  SignedSupport out;
  for (auto& [p, c] : acc) {
    out.points.push_back(p);
    out.delta.push_back(c);
  }
  return out;
}

// Transport value of the signed difference under cost min(L d, 2(1 - L)).
double budget_value(const SignedSupport& s, const std::vector<std::vector<double>>& d, double L) {
  std::vector<std::size_t> src, snk;
  for (std::size_t i = 0; i < s.delta.size(); ++i) {
    if (s.delta[i] > kMassEps) src.push_back(i);
    else if (s.delta[i] < -kMassEps) snk.push_back(i);
  }
  if (src.empty() || snk.empty()) return 0.0;
  const double cap = 2.0 * (1.0 - L);
  std::vector<double> supply, demand;
  for (auto i : src) supply.push_back(s.delta[i]);
  for (auto j : snk) demand.push_back(-s.delta[j]);
  // The unmatched mass (|sum supply - sum demand|, pure fp residue) is dropped
  // by padding the smaller side onto its last entry; magnitudes are ~1e-16.
  double ssum = 0.0, dsum = 0.0;
  for (double v : supply) ssum += v;
  for (double v : demand) dsum += v;
  const double m = std::min(ssum, dsum);
  for (double& v : supply) v *= m / ssum;
  for (double& v : demand) v *= m / dsum;

  std::vector<std::vector<double>> cost(src.size(), std::vector<double>(snk.size()));
  for (std::size_t a = 0; a < src.size(); ++a)
    for (std::size_t b = 0; b < snk.size(); ++b)
      cost[a][b] = std::min(L * d[src[a]][snk[b]], cap);
  return min_cost_transport(supply, demand, cost);
}

}  // namespace

DualLipschitzResult dual_lipschitz_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                            const MetricSpace& space, DlMode mode) {
  if (mu.empty() || nu.empty())
    throw std::invalid_argument("dual_lipschitz_distance: empty measure");

  const SignedSupport s = merged_difference(mu, nu);
  const std::size_t n = s.points.size();

  DualLipschitzResult res;
  res.support_size = n;

  if (mode == DlMode::Dictionary) {
    res.lower_bound = true;
    // Deterministic stride subsample keeps the center count bounded.
    constexpr std::size_t kMaxCenters = 512;
    const std::size_t stride = n > kMaxCenters ? (n + kMaxCenters - 1) / kMaxCenters : 1;
    double best = 0.0;
    for (std::size_t p = 0; p < n; p += stride) {
      std::vector<double> row(n);
      std::vector<double> positive;
      for (std::size_t i = 0; i < n; ++i) {
        row[i] = space.distance(s.points[i], s.points[p]);
        if (row[i] > 0.0) positive.push_back(row[i]);
      }
      if (positive.empty()) continue;
      std::sort(positive.begin(), positive.end());
      const double radii[3] = {positive[positive.size() / 4], positive[positive.size() / 2],
                               positive.back()};
      for (double a : radii) {
        double pair = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          pair += s.delta[i] * std::max(a - row[i], 0.0) / (a + 1.0);
        best = std::max(best, std::abs(pair));
      }
    }
    res.value = best;
    return res;
  }

  if (n > kExactSmallMaxAtoms)
    throw std::invalid_argument(
        "dual_lipschitz_distance: exact mode needs combined support <= 64 atoms");

  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = space.distance(s.points[i], s.points[j]);

  auto g = [&](double L) { return budget_value(s, d, L); };

  // Golden-section maximization of the concave budget profile on [0, 1].
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  while (hi - lo > 1e-10) {
    if (g1 < g2) {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + gr * (hi - lo);
      g2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - gr * (hi - lo);
      g1 = g(x1);
    }
  }
  const double l_star = 0.5 * (lo + hi);
  const double v_star = std::max({g(l_star), g1, g2});

  // The profile is piecewise linear and concave, so the optimum set is an
  // interval; report its left edge (smallest Lipschitz budget).
  double llo = 0.0, lhi = l_star;
  while (lhi - llo > 1e-9) {
    const double m = 0.5 * (llo + lhi);
    if (g(m) >= v_star - 1e-12)
      lhi = m;
    else
      llo = m;
  }
  res.value = v_star;
  res.lipschitz_budget = lhi;
  return res;
}

DualLipschitzResult dual_lipschitz_auto(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                        const MetricSpace& space) {
  const EmpiricalMeasure ma = mu.merged(), mb = nu.merged();
  const std::size_t combined = merged_difference(ma, mb).points.size();
  if (combined <= kExactSmallMaxAtoms)
    return dual_lipschitz_distance(ma, mb, space, DlMode::ExactSmall);
  if (space.dimension() == 1 && space.components().front().kind != MetricSpace::Kind::Torus) {
    double dev_a = 0.0, dev_b = 0.0;
    const auto qa = quantile_binned(ma, kExactSmallMaxAtoms / 2, &dev_a);
    const auto qb = quantile_binned(mb, kExactSmallMaxAtoms / 2, &dev_b);
    auto res = dual_lipschitz_distance(qa, qb, space, DlMode::ExactSmall);
    res.binning_deviation = dev_a + dev_b;
    return res;
  }
  return dual_lipschitz_distance(ma, mb, space, DlMode::Dictionary);
}

}  // namespace ergo
