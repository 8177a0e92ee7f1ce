#pragma once

// Finitely supported measures: weighted atom lists with strictly positive
// weights. Serialized as CSV (one atom per row) or JSON with the space
// descriptor embedded.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "ergo/metric_space.hpp"
#include "ergo/test_function.hpp"

namespace ergo {

struct WeightedAtom {
  Point point;
  double weight;
};

class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;
  static EmpiricalMeasure dirac(Point x) {
    EmpiricalMeasure m;
    m.add(std::move(x), 1.0);
    return m;
  }

  void add(Point x, double weight);
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const std::vector<WeightedAtom>& atoms() const { return atoms_; }
  double total_weight() const { return total_; }
  bool is_probability(double tol = 1e-12) const;

  // Integral of f against the normalized measure.
  double integrate(const TestFunction& f) const;
  // Normalized mass of the open ball {x : d(x,z) < eps}.
  double ball_mass(const MetricSpace& space, const Point& z, double eps) const;
  // Normalized mass within distance < eps of a finite point set.
  double set_mass(const MetricSpace& space, const std::vector<Point>& centers, double eps) const;

  // Sum weights of exactly coincident atoms (bitwise-equal coordinates).
  EmpiricalMeasure merged() const;
  // Rescale weights to total 1. Throws on empty measure.
  void normalize();
  // Drop atoms with normalized weight below threshold, then renormalize.
  EmpiricalMeasure pruned(double min_weight) const;

  void write_csv(std::ostream& os) const;
  std::string to_csv() const;
  static EmpiricalMeasure from_csv(std::istream& is);
  std::string to_json(const MetricSpace& space) const;
  static EmpiricalMeasure from_json(const std::string& text, MetricSpace* space_out = nullptr);

 private:
  std::vector<WeightedAtom> atoms_;
  double total_ = 0.0;
};

// Equal-mass quantile coarsening of a 1-d sample measure to at most n_bins
// atoms placed at bin means. Used to feed large samples to the exact
// dual-Lipschitz solver; the distance perturbation is at most the Lipschitz
// budget times mean_within_bin_deviation (reported via *deviation_out).
EmpiricalMeasure quantile_binned(const EmpiricalMeasure& mu, std::size_t n_bins,
                                 double* deviation_out = nullptr);

}  // namespace ergo
