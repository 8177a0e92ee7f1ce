#include "ergo/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ergo/dual_lipschitz.hpp"
#include "ergo/rng.hpp"
#include "ergo/version.hpp"

namespace ergo {
namespace {

constexpr double kSigmas = 3.0;  // the 3-standard-error convention, everywhere

void require_model(const SemigroupModel& model) {
  if (!model.sampler) throw std::invalid_argument("model '" + model.id + "' has no sampler");
}

void require_traj_count(int n_traj) {
  if (n_traj < 2) throw std::invalid_argument("n_traj must be >= 2");
}

void require_time(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
}

void require_t_grid(const std::vector<double>& t_grid) {
  if (t_grid.size() < 4) throw std::invalid_argument("t_grid needs at least 4 points");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0)) throw std::invalid_argument("t_grid entries must be > 0");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("t_grid must be strictly increasing");
  }
}

[[noreturn]] void rethrow_with_index(const SemigroupModel& model, std::uint64_t j,
                                     const std::exception& e) {
  throw std::runtime_error(model.id + ": trajectory " + std::to_string(j) + ": " + e.what());
}

// Midpoint time average of f along one realized path over [0, t].
double path_time_average(const SemigroupModel::StateAt& path, const TestFunction& f, double t) {
  double sum = 0.0;
  for (int i = 0; i < kQtPanels; ++i)
    sum += f(path((i + 0.5) * t / kQtPanels));
  return sum / kQtPanels;
}

double cell_abs(const EvidenceCell& c) { return std::abs(c.estimate); }

std::size_t trailing_start(std::size_t n) { return n / 2; }

}  // namespace

std::vector<double> geometric_grid(double t0, double ratio, std::size_t n) {
  if (!(t0 > 0.0) || !(ratio > 1.0) || n < 2)
    throw std::invalid_argument("geometric_grid: need t0 > 0, ratio > 1, n >= 2");
  std::vector<double> g(n);
  g[0] = t0;
  for (std::size_t i = 1; i < n; ++i) g[i] = g[i - 1] * ratio;
  return g;
}

std::string to_string(LowerBoundCondition c) {
  switch (c) {
    case LowerBoundCondition::C1: return "C1";
    case LowerBoundCondition::C2: return "C2";
    case LowerBoundCondition::C3: return "C3";
    case LowerBoundCondition::C4: return "C4";
    case LowerBoundCondition::C: return "C";
  }
  return "?";
}

std::string to_string(RegularityNotion n) {
  switch (n) {
    case RegularityNotion::EProp: return "e_prop";
    case RegularityNotion::CesaroEProp: return "cesaro_e_prop";
    case RegularityNotion::Evc: return "evc";
    case RegularityNotion::CesaroEvc: return "cesaro_evc";
  }
  return "?";
}

CesaroEstimate estimate_Qt(const SemigroupModel& model, const TestFunction& f, const Point& x,
                           double t, int n_traj, std::uint64_t seed) {
  require_model(model);
  require_time(t);
  require_traj_count(n_traj);
  Accumulator acc;
  for (int j = 0; j < n_traj; ++j) {
    try {
      const auto path = model.sampler(x, t, seed, static_cast<std::uint64_t>(j));
      acc.add(path_time_average(path, f, t));
    } catch (const std::exception& e) {
      rethrow_with_index(model, static_cast<std::uint64_t>(j), e);
    }
  }
  CesaroEstimate out;
  out.value = acc.mean();
  out.std_error = acc.std_error();
  out.n_trajectories = n_traj;
  out.t = t;
  return out;
}

CesaroEstimate estimate_Pt(const SemigroupModel& model, const TestFunction& f, const Point& x,
                           double t, int n_traj, std::uint64_t seed) {
  require_model(model);
  require_time(t);
  require_traj_count(n_traj);
  Accumulator acc;
  for (int j = 0; j < n_traj; ++j) {
    try {
      const auto path = model.sampler(x, t, seed, static_cast<std::uint64_t>(j));
      acc.add(f(path(t)));
    } catch (const std::exception& e) {
      rethrow_with_index(model, static_cast<std::uint64_t>(j), e);
    }
  }
  CesaroEstimate out;
  out.value = acc.mean();
  out.std_error = acc.std_error();
  out.n_trajectories = n_traj;
  out.t = t;
  out.method = "ensemble_endpoint";
  return out;
}

EmpiricalMeasure estimate_Qt_measure(const SemigroupModel& model, const Point& x, double t,
                                     int n_traj, int n_time_samples, std::uint64_t seed) {
  require_model(model);
  require_time(t);
  require_traj_count(n_traj);
  if (n_time_samples < 1) throw std::invalid_argument("n_time_samples must be >= 1");
  EmpiricalMeasure pooled;
  for (int j = 0; j < n_traj; ++j) {
    try {
      const auto path = model.sampler(x, t, seed, static_cast<std::uint64_t>(j));
      RngStream times(seed, static_cast<std::uint64_t>(j), kTagProbeTime, 0);
      for (int i = 0; i < n_time_samples; ++i)
        pooled.add(path(t * (i + times.uniform01()) / n_time_samples), 1.0);
    } catch (const std::exception& e) {
      rethrow_with_index(model, static_cast<std::uint64_t>(j), e);
    }
  }
  pooled.normalize();
  return pooled;
}

ConditionReport probe_lower_bound(const SemigroupModel& model, LowerBoundCondition which,
                                  const std::vector<Point>& z_or_K, double eps,
                                  const std::vector<Point>& x_grid,
                                  const std::vector<double>& t_grid, int n_traj,
                                  std::uint64_t seed, double margin) {
  require_model(model);
  require_t_grid(t_grid);
  require_traj_count(n_traj);
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  const bool set_condition = which == LowerBoundCondition::C;
  if (!set_condition && z_or_K.size() != 1)
    throw std::invalid_argument(to_string(which) + " takes exactly one center z");
  const bool endpoint = which == LowerBoundCondition::C4;  // liminf of P_t, not Q_t
  const std::vector<Point>& starts =
      which == LowerBoundCondition::C1 ? z_or_K : x_grid;
  if (starts.empty()) throw std::invalid_argument("x_grid must be non-empty");

  ConditionReport report;
  report.condition = to_string(which);
  report.t_grid = t_grid;
  report.trailing_from = trailing_start(t_grid.size());
  report.n_traj = n_traj;
  report.seed = seed;
  report.margin = margin;

  const double t_max = t_grid.back();
  double proxy = std::numeric_limits<double>::infinity();
  double proxy_se = 0.0;
  EvidenceCell proxy_cell;
  for (const Point& x : starts) {
    std::vector<Accumulator> acc(t_grid.size());
    for (int j = 0; j < n_traj; ++j) {
      try {
        const auto path = model.sampler(x, t_max, seed, static_cast<std::uint64_t>(j));
        for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
          const double t = t_grid[ti];
          if (endpoint) {
            double dist = std::numeric_limits<double>::infinity();
            const Point state = path(t);
            for (const Point& c : z_or_K) dist = std::min(dist, model.space.distance(state, c));
            acc[ti].add(dist < eps ? 1.0 : 0.0);
          } else {
            RngStream times(seed, static_cast<std::uint64_t>(j), kTagProbeTime, ti);
            int hits = 0;
            for (int i = 0; i < kQtTimeSamples; ++i) {
              const Point state = path(t * (i + times.uniform01()) / kQtTimeSamples);
              double dist = std::numeric_limits<double>::infinity();
              for (const Point& c : z_or_K) dist = std::min(dist, model.space.distance(state, c));
              if (dist < eps) ++hits;
            }
            acc[ti].add(static_cast<double>(hits) / kQtTimeSamples);
          }
        }
      } catch (const std::exception& e) {
        rethrow_with_index(model, static_cast<std::uint64_t>(j), e);
      }
    }
    // limsup proxy: max over the trailing window; liminf (C4): min.
    double best = endpoint ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
    std::size_t best_ti = report.trailing_from;
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      EvidenceCell cell{t_grid[ti], x, acc[ti].mean(), acc[ti].std_error(), report.condition};
      report.grid.push_back(cell);
      if (ti < report.trailing_from) continue;
      const bool better = endpoint ? acc[ti].mean() < best : acc[ti].mean() > best;
      if (better) {
        best = acc[ti].mean();
        best_ti = ti;
      }
    }
    if (best < proxy) {  // inf over the start grid
      proxy = best;
      proxy_se = acc[best_ti].std_error();
      proxy_cell = EvidenceCell{t_grid[best_ti], x, best, proxy_se, report.condition};
    }
  }
  report.proxy = proxy;
  report.proxy_se = proxy_se;
  if (proxy - kSigmas * proxy_se > margin) {
    report.verdict = "supported";
  } else if (proxy + kSigmas * proxy_se <= margin) {
    report.verdict = "refuted_at_confidence";
    report.witness = proxy_cell;
    report.has_witness = true;
  }
  report.notes = "inf over finite start grid and max/min over finite t-window: supported on grid";
  return report;
}

ConditionReport probe_regularity(const SemigroupModel& model, RegularityNotion which,
                                 const Point& z, const TestFunction& f,
                                 const std::vector<double>& radii,
                                 const std::vector<double>& t_grid, int n_traj,
                                 std::uint64_t seed, double tol) {
  require_model(model);
  require_t_grid(t_grid);
  require_traj_count(n_traj);
  if (radii.empty()) throw std::invalid_argument("radii must be non-empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw std::invalid_argument("radii must be > 0");
    if (i > 0 && !(radii[i] < radii[i - 1]))
      throw std::invalid_argument("radii must be strictly decreasing");
  }
  if (!model.sphere_point) throw std::invalid_argument("model has no sphere_point rule");
  const bool cesaro =
      which == RegularityNotion::CesaroEProp || which == RegularityNotion::CesaroEvc;
  const bool sup_full_grid =
      which == RegularityNotion::EProp || which == RegularityNotion::CesaroEProp;

  ConditionReport report;
  report.condition = to_string(which);
  report.t_grid = t_grid;
  report.trailing_from = sup_full_grid ? 0 : trailing_start(t_grid.size());
  report.n_traj = n_traj;
  report.seed = seed;
  report.margin = tol;

  const double t_max = t_grid.back();
  // One coupled z-path ensemble, shared across radii: per trajectory j the
  // start x(r) and z consume the same substreams (common random numbers).
  std::vector<std::vector<double>> z_vals(t_grid.size());  // [t][j]
  for (int j = 0; j < n_traj; ++j) {
    try {
      const auto path = model.sampler(z, t_max, seed, static_cast<std::uint64_t>(j));
      for (std::size_t ti = 0; ti < t_grid.size(); ++ti)
        z_vals[ti].push_back(cesaro ? path_time_average(path, f, t_grid[ti])
                                    : f(path(t_grid[ti])));
    } catch (const std::exception& e) {
      rethrow_with_index(model, static_cast<std::uint64_t>(j), e);
    }
  }

  EvidenceCell last_extreme;
  double last_proxy = 0.0, last_se = 0.0;
  for (const double r : radii) {
    const Point x = model.sphere_point(z, r);
    std::vector<Accumulator> gap(t_grid.size());
    for (int j = 0; j < n_traj; ++j) {
      try {
        const auto path = model.sampler(x, t_max, seed, static_cast<std::uint64_t>(j));
        for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
          const double vx = cesaro ? path_time_average(path, f, t_grid[ti])
                                   : f(path(t_grid[ti]));
          gap[ti].add(vx - z_vals[ti][static_cast<std::size_t>(j)]);
        }
      } catch (const std::exception& e) {
        rethrow_with_index(model, static_cast<std::uint64_t>(j), e);
      }
    }
    double best = -1.0;
    std::size_t best_ti = 0;
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      EvidenceCell cell{t_grid[ti], x, gap[ti].mean(), gap[ti].std_error(),
                        "r=" + std::to_string(r)};
      report.grid.push_back(cell);
      if (ti < report.trailing_from) continue;
      if (std::abs(gap[ti].mean()) > best) {
        best = std::abs(gap[ti].mean());
        best_ti = ti;
      }
    }
    last_proxy = best;
    last_se = gap[best_ti].std_error();
    last_extreme = EvidenceCell{t_grid[best_ti], x, gap[best_ti].mean(),
                                gap[best_ti].std_error(), "r=" + std::to_string(r)};
    report.gap_curve.push_back({r, last_proxy, last_se});
  }

  // The smallest radius stands proxy for the r -> 0 limit.
  report.proxy = last_proxy;
  report.proxy_se = last_se;
  if (last_proxy + kSigmas * last_se <= tol) {
    report.verdict = "supported";
  } else if (last_proxy - kSigmas * last_se > tol) {
    report.verdict = "refuted_at_confidence";
    report.witness = last_extreme;
    report.has_witness = true;
  }
  report.notes = "sup/limsup over finite t-window; smallest radius proxies the x -> z limit";
  return report;
}

namespace {

// Deterministic thinning so large sample clouds stay tractable for the
// dual-Lipschitz solver. Duplicate points are merged first (lattice measures
// collapse below the cap and skip thinning altogether); the survivors are
// visited along a coprime-stride walk, which covers every residue class of
// any block/stratum length dividing the atom count. A plain stride can alias
// against the trajectory-major stratified time layout and oversample a few
// time strata.
EmpiricalMeasure thinned(const EmpiricalMeasure& m, std::size_t cap) {
  const EmpiricalMeasure base = m.merged();
  const std::size_t n = base.size();
  if (n <= cap) return base;
  std::size_t stride = std::max<std::size_t>(n / cap, 2);
  while (std::gcd(stride, n) != 1) ++stride;
  EmpiricalMeasure out;
  std::size_t idx = 0;
  for (std::size_t k = 0; k < cap; ++k, idx = (idx + stride) % n)
    out.add(base.atoms()[idx].point, base.atoms()[idx].weight);
  out.normalize();
  return out;
}

constexpr std::size_t kDecompositionAtomCap = 2048;

double measure_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                        const MetricSpace& space) {
  return dual_lipschitz_auto(thinned(a, kDecompositionAtomCap),
                             thinned(b, kDecompositionAtomCap), space)
      .value;
}

EmpiricalMeasure mixture(const EmpiricalMeasure& a, double w, const EmpiricalMeasure& b) {
  // Endpoint weights (w = 0 or 1) degenerate to a single component; skip the
  // zero-mass atoms rather than feed them to add().
  EmpiricalMeasure out;
  if (w > 0.0)
    for (const auto& atom : a.atoms()) out.add(atom.point, w * atom.weight / a.total_weight());
  if (w < 1.0)
    for (const auto& atom : b.atoms())
      out.add(atom.point, (1.0 - w) * atom.weight / b.total_weight());
  if (out.empty()) throw std::invalid_argument("mixture of empty measures");
  out.normalize();
  return out;
}

// Atoms carrying visible mass; per-atom threshold adapts to sample clouds of
// many equal-weight atoms (where 0.01 per atom would drop everything).
std::vector<Point> visible_support(const EmpiricalMeasure& m) {
  const double threshold = std::min(0.01, 0.5 / static_cast<double>(std::max<std::size_t>(m.size(), 1)));
  const EmpiricalMeasure pruned = m.merged().pruned(threshold);
  std::vector<Point> pts;
  for (const auto& atom : pruned.atoms()) pts.push_back(atom.point);
  return pts;
}

}  // namespace

ErgodicClassReport ergodic_decomposition(const SemigroupModel& model,
                                         const std::vector<Point>& x_list, double t, int n_traj,
                                         double cluster_tol, std::uint64_t seed,
                                         int n_time_samples, double support_eps) {
  require_model(model);
  require_time(t);
  require_traj_count(n_traj);
  if (x_list.empty()) throw std::invalid_argument("x_list must be non-empty");
  if (!(cluster_tol > 0.0)) throw std::invalid_argument("cluster_tol must be > 0");

  ErgodicClassReport report;
  report.representatives = x_list;
  report.t = t;
  report.cluster_tol = cluster_tol;
  report.support_eps = support_eps;
  report.n_traj = n_traj;
  report.seed = seed;

  const std::size_t n = x_list.size();
  for (const Point& x : x_list) {
    const EmpiricalMeasure full = estimate_Qt_measure(model, x, t, n_traj, n_time_samples, seed);
    const EmpiricalMeasure half =
        estimate_Qt_measure(model, x, t / 2, n_traj, n_time_samples, seed);
    const double drift = measure_distance(full, half, model.space);
    report.limits.push_back(full);
    report.stable.push_back(drift <= cluster_tol / 2 ? 1 : 0);
  }

  report.distance.assign(n, std::vector<double>(n, 0.0));
  struct PairDist {
    double d;
    std::size_t i, j;
  };
  std::vector<PairDist> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = measure_distance(report.limits[i], report.limits[j], model.space);
      report.distance[i][j] = report.distance[j][i] = d;
      pairs.push_back({d, i, j});
    }

  // Single linkage: merge in ascending distance order (ties by index).
  std::sort(pairs.begin(), pairs.end(), [](const PairDist& a, const PairDist& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
    return parent[v] == v ? v : parent[v] = find(parent[v]);
  };
  for (const auto& p : pairs)
    if (p.d < cluster_tol) parent[std::max(find(p.i), find(p.j))] = std::min(find(p.i), find(p.j));

  // Canonical class ids ordered by smallest member.
  report.cluster_of.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (report.cluster_of[root] < 0) {
      report.cluster_of[root] = static_cast<int>(report.clusters.size());
      report.clusters.push_back({});
    }
    report.cluster_of[i] = report.cluster_of[root];
    report.clusters[static_cast<std::size_t>(report.cluster_of[i])].push_back(
        static_cast<int>(i));
  }

  const std::size_t n_classes = report.clusters.size();
  std::vector<EmpiricalMeasure> class_measure(n_classes);
  std::vector<char> class_stable(n_classes, 1);
  for (std::size_t c = 0; c < n_classes; ++c) {
    EmpiricalMeasure pooled;
    for (int member : report.clusters[c]) {
      const auto& m = report.limits[static_cast<std::size_t>(member)];
      for (const auto& atom : m.atoms()) pooled.add(atom.point, atom.weight / m.total_weight());
      if (!report.stable[static_cast<std::size_t>(member)]) class_stable[c] = 0;
    }
    pooled.normalize();
    class_measure[c] = pooled;
  }

  // Ergodic candidate: stable and not visibly a convex mixture of two other
  // classes (weight grid 0.05).
  report.ergodic_candidate.assign(n_classes, 0);
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (!class_stable[c]) continue;
    bool is_mixture = false;
    for (std::size_t a = 0; a < n_classes && !is_mixture; ++a) {
      if (a == c) continue;
      for (std::size_t b = a + 1; b < n_classes && !is_mixture; ++b) {
        if (b == c) continue;
        for (int wi = 0; wi <= 20 && !is_mixture; ++wi) {
          const double w = wi * 0.05;
          if (measure_distance(class_measure[c], mixture(class_measure[a], w, class_measure[b]),
                               model.space) < cluster_tol)
            is_mixture = true;
        }
      }
    }
    report.ergodic_candidate[c] = is_mixture ? 0 : 1;
  }

  report.support_gap.assign(n_classes, std::vector<double>(n_classes, 0.0));
  std::vector<std::vector<Point>> supports(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) supports[c] = visible_support(class_measure[c]);
  for (std::size_t a = 0; a < n_classes; ++a)
    for (std::size_t b = a + 1; b < n_classes; ++b) {
      double gap = std::numeric_limits<double>::infinity();
      for (const Point& p : supports[a])
        for (const Point& q : supports[b]) gap = std::min(gap, model.space.distance(p, q));
      report.support_gap[a][b] = report.support_gap[b][a] = gap;
      if (report.ergodic_candidate[a] && report.ergodic_candidate[b] && gap < support_eps) {
        report.emds_violation = true;
        report.emds_pairs.push_back({static_cast<int>(a), static_cast<int>(b)});
      }
    }
  return report;
}

ConditionReport weak_star_mean_ergodicity_check(const SemigroupModel& model,
                                                const std::vector<Point>& x_list,
                                                const std::vector<TestFunction>& f_list,
                                                const std::vector<double>& t_grid, int n_traj,
                                                std::uint64_t seed, double tol) {
  require_model(model);
  require_t_grid(t_grid);
  require_traj_count(n_traj);
  if (x_list.size() < 2) throw std::invalid_argument("need at least 2 starts");
  if (f_list.size() < 3) throw std::invalid_argument("need at least 3 test functions");

  ConditionReport report;
  report.condition = "weak_star_mean_ergodicity";
  report.t_grid = t_grid;
  report.trailing_from = trailing_start(t_grid.size());
  report.n_traj = n_traj;
  report.seed = seed;
  report.margin = tol;

  const double t_max = t_grid.back();
  const std::size_t nx = x_list.size(), nf = f_list.size(), nt = t_grid.size();
  // Per-trajectory Cesaro averages at t_max, kept per (x, f) so start pairs
  // sharing substreams difference out their common randomness.
  std::vector<std::vector<std::vector<double>>> qvals(
      nx, std::vector<std::vector<double>>(nf));
  std::vector<std::vector<std::vector<Accumulator>>> pt(
      nx, std::vector<std::vector<Accumulator>>(nf, std::vector<Accumulator>(nt)));
  for (std::size_t xi = 0; xi < nx; ++xi) {
    for (int j = 0; j < n_traj; ++j) {
      try {
        const auto path = model.sampler(x_list[xi], t_max, seed, static_cast<std::uint64_t>(j));
        for (std::size_t fi = 0; fi < nf; ++fi) {
          qvals[xi][fi].push_back(path_time_average(path, f_list[fi], t_max));
          for (std::size_t ti = report.trailing_from; ti < nt; ++ti)
            pt[xi][fi][ti].add(f_list[fi](path(t_grid[ti])));
        }
      } catch (const std::exception& e) {
        rethrow_with_index(model, static_cast<std::uint64_t>(j), e);
      }
    }
  }

  for (std::size_t xi = 0; xi < nx; ++xi)
    for (std::size_t fi = 0; fi < nf; ++fi) {
      Accumulator acc;
      for (double v : qvals[xi][fi]) acc.add(v);
      report.grid.push_back(EvidenceCell{t_max, x_list[xi], acc.mean(), acc.std_error(),
                                         "Qt:" + f_list[fi].name});
    }

  double worst = 0.0, worst_se = 0.0;
  EvidenceCell worst_cell;
  for (std::size_t fi = 0; fi < nf; ++fi)
    for (std::size_t a = 0; a < nx; ++a)
      for (std::size_t b = a + 1; b < nx; ++b) {
        Accumulator diff;
        for (int j = 0; j < n_traj; ++j)
          diff.add(qvals[a][fi][static_cast<std::size_t>(j)] -
                   qvals[b][fi][static_cast<std::size_t>(j)]);
        const double gap = std::abs(diff.mean());
        EvidenceCell cell{t_max, x_list[a], diff.mean(), diff.std_error(),
                          "Qt_gap:" + f_list[fi].name + ":x" + std::to_string(a) + "-x" +
                              std::to_string(b)};
        report.grid.push_back(cell);
        if (gap > worst) {
          worst = gap;
          worst_se = diff.std_error();
          worst_cell = cell;
        }
      }
  report.proxy = worst;
  report.proxy_se = worst_se;
  if (worst + kSigmas * worst_se <= tol) {
    report.verdict = "supported";
  } else if (worst - kSigmas * worst_se > tol) {
    report.verdict = "refuted_at_confidence";
    report.witness = worst_cell;
    report.has_witness = true;
  }

  // P_t-level convergence check over the trailing window: does P_t f(x)
  // itself settle, or only its Cesaro average?
  double worst_spread = 0.0, worst_spread_se = 0.0;
  for (std::size_t xi = 0; xi < nx; ++xi)
    for (std::size_t fi = 0; fi < nf; ++fi) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo, se_lo = 0.0, se_hi = 0.0;
      for (std::size_t ti = report.trailing_from; ti < nt; ++ti) {
        const double m = pt[xi][fi][ti].mean();
        report.grid.push_back(EvidenceCell{t_grid[ti], x_list[xi], m,
                                           pt[xi][fi][ti].std_error(),
                                           "Pt:" + f_list[fi].name});
        if (m < lo) { lo = m; se_lo = pt[xi][fi][ti].std_error(); }
        if (m > hi) { hi = m; se_hi = pt[xi][fi][ti].std_error(); }
      }
      const double spread = hi - lo;
      if (spread > worst_spread) {
        worst_spread = spread;
        worst_spread_se = pooled_se(se_lo, se_hi);
      }
    }
  std::string pt_verdict = "inconclusive";
  if (worst_spread + kSigmas * worst_spread_se <= tol) pt_verdict = "supported";
  else if (worst_spread - kSigmas * worst_spread_se > tol) pt_verdict = "refuted_at_confidence";
  report.sub_verdicts.push_back({"pt_level_convergence", pt_verdict});

  // Cross-checks at the model anchor.
  const auto c3 = probe_lower_bound(model, LowerBoundCondition::C3, {model.anchor}, 0.5, x_list,
                                    t_grid, n_traj, seed);
  report.sub_verdicts.push_back({"lower_bound_C3", c3.verdict});
  const auto evc = probe_regularity(model, RegularityNotion::CesaroEvc, model.anchor, f_list[0],
                                    {0.5, 0.25, 0.125}, t_grid, n_traj, seed, tol);
  report.sub_verdicts.push_back({"cesaro_evc", evc.verdict});
  report.notes = "pairwise Cesaro collapse at t_max; sub-verdicts cross-check the equivalence";
  return report;
}

ConditionReport sweep_check(const SemigroupModel& model, const std::vector<Point>& K_centers,
                            double eps, const std::vector<Point>& x_list,
                            const std::vector<double>& t_grid, int n_traj, std::uint64_t seed) {
  require_model(model);
  require_t_grid(t_grid);
  require_traj_count(n_traj);
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  if (x_list.empty()) throw std::invalid_argument("x_list must be non-empty");

  ConditionReport report;
  report.condition = "sweep";
  report.t_grid = t_grid;
  report.trailing_from = trailing_start(t_grid.size());
  report.n_traj = n_traj;
  report.seed = seed;

  const double t_max = t_grid.back();
  const std::size_t nt = t_grid.size();
  bool all_supported = true;
  bool any_refuted = false;
  double worst_final = 0.0, worst_final_se = 0.0;
  for (const Point& x : x_list) {
    std::vector<Accumulator> acc(nt);
    for (int j = 0; j < n_traj; ++j) {
      try {
        const auto path = model.sampler(x, t_max, seed, static_cast<std::uint64_t>(j));
        for (std::size_t ti = 0; ti < nt; ++ti) {
          const Point state = path(t_grid[ti]);
          double dist = std::numeric_limits<double>::infinity();
          for (const Point& c : K_centers) dist = std::min(dist, model.space.distance(state, c));
          acc[ti].add(dist < eps ? 1.0 : 0.0);
        }
      } catch (const std::exception& e) {
        rethrow_with_index(model, static_cast<std::uint64_t>(j), e);
      }
    }
    double lead_max = 0.0, lead_se = 0.0, trail_max = 0.0, trail_se = 0.0;
    double trail_min = std::numeric_limits<double>::infinity(), trail_min_se = 0.0;
    std::size_t trail_min_ti = report.trailing_from;
    for (std::size_t ti = 0; ti < nt; ++ti) {
      report.grid.push_back(
          EvidenceCell{t_grid[ti], x, acc[ti].mean(), acc[ti].std_error(), "sweep"});
      if (ti < report.trailing_from) {
        if (acc[ti].mean() > lead_max) { lead_max = acc[ti].mean(); lead_se = acc[ti].std_error(); }
      } else {
        if (acc[ti].mean() > trail_max) { trail_max = acc[ti].mean(); trail_se = acc[ti].std_error(); }
        if (acc[ti].mean() < trail_min) {
          trail_min = acc[ti].mean();
          trail_min_se = acc[ti].std_error();
          trail_min_ti = ti;
        }
      }
    }
    const double final_mean = acc[nt - 1].mean();
    const double final_se = acc[nt - 1].std_error();
    if (final_mean > worst_final) { worst_final = final_mean; worst_final_se = final_se; }
    const bool x_supported = final_mean <= kSigmas * final_se &&
                             trail_max <= lead_max + kSigmas * pooled_se(lead_se, trail_se);
    if (!x_supported) all_supported = false;
    if (trail_min - kSigmas * trail_min_se > 0.0) {
      any_refuted = true;
      if (!report.has_witness) {
        report.witness =
            EvidenceCell{t_grid[trail_min_ti], x, trail_min, trail_min_se, "sweep"};
        report.has_witness = true;
      }
    }
  }
  report.proxy = worst_final;
  report.proxy_se = worst_final_se;
  if (any_refuted) report.verdict = "refuted_at_confidence";
  else if (all_supported) report.verdict = "supported";
  report.notes = "P_t(x, K^eps) trajectory fractions; supported = downward trend, final <= 3 SE";
  return report;
}

namespace {

nlohmann::json cell_to_json(const EvidenceCell& c) {
  return {{"t", c.t},
          {"x", c.x},
          {"estimate", c.estimate},
          {"std_error", c.std_error},
          {"label", c.label}};
}

}  // namespace

nlohmann::json report_to_json(const ConditionReport& report) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["condition"] = report.condition;
  j["verdict"] = report.verdict;
  j["proxy"] = report.proxy;
  j["proxy_se"] = report.proxy_se;
  j["margin"] = report.margin;
  j["t_grid"] = report.t_grid;
  j["trailing_from"] = report.trailing_from;
  j["n_traj"] = report.n_traj;
  j["seed"] = report.seed;
  j["notes"] = report.notes;
  j["grid"] = nlohmann::json::array();
  for (const auto& cell : report.grid) j["grid"].push_back(cell_to_json(cell));
  if (report.has_witness) j["witness"] = cell_to_json(report.witness);
  if (!report.gap_curve.empty()) {
    j["gap_curve"] = nlohmann::json::array();
    for (const auto& row : report.gap_curve)
      j["gap_curve"].push_back({{"radius", row[0]}, {"gap", row[1]}, {"std_error", row[2]}});
  }
  if (!report.sub_verdicts.empty()) {
    j["sub_verdicts"] = nlohmann::json::object();
    for (const auto& [name, verdict] : report.sub_verdicts) j["sub_verdicts"][name] = verdict;
  }
  return j;
}

std::string report_to_csv(const ConditionReport& report) {
  std::size_t dim = 0;
  for (const auto& cell : report.grid) dim = std::max(dim, cell.x.size());
  std::ostringstream os;
  os.precision(17);
  os << "label,t,estimate,std_error";
  for (std::size_t i = 0; i < dim; ++i) os << ",x" << i;
  os << "\n";
  for (const auto& cell : report.grid) {
    os << cell.label << "," << cell.t << "," << cell.estimate << "," << cell.std_error;
    for (std::size_t i = 0; i < dim; ++i)
      os << "," << (i < cell.x.size() ? cell.x[i] : 0.0);
    os << "\n";
  }
  return os.str();
}

nlohmann::json decomposition_to_json(const ErgodicClassReport& report, const MetricSpace& space) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["t"] = report.t;
  j["cluster_tol"] = report.cluster_tol;
  j["support_eps"] = report.support_eps;
  j["n_traj"] = report.n_traj;
  j["seed"] = report.seed;
  j["representatives"] = report.representatives;
  j["stable"] = nlohmann::json::array();
  for (char s : report.stable) j["stable"].push_back(static_cast<bool>(s));
  j["distance"] = report.distance;
  j["cluster_of"] = report.cluster_of;
  j["clusters"] = report.clusters;
  j["ergodic_candidate"] = nlohmann::json::array();
  for (char s : report.ergodic_candidate) j["ergodic_candidate"].push_back(static_cast<bool>(s));
  j["support_gap"] = report.support_gap;
  j["emds_violation"] = report.emds_violation;
  j["emds_pairs"] = report.emds_pairs;
  j["limits"] = nlohmann::json::array();
  for (const auto& m : report.limits)
    j["limits"].push_back(nlohmann::json::parse(m.to_json(space)));
  return j;
}

std::string decomposition_to_csv(const ErgodicClassReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "i,j,distance,same_cluster,class_i,class_j,support_gap\n";
  const std::size_t n = report.representatives.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const int ci = report.cluster_of[i], cj = report.cluster_of[j];
      os << i << "," << j << "," << report.distance[i][j] << "," << (ci == cj ? 1 : 0) << ","
         << ci << "," << cj << ","
         << report.support_gap[static_cast<std::size_t>(ci)][static_cast<std::size_t>(cj)]
         << "\n";
    }
  return os.str();
}

}  // namespace ergo
