#pragma once

// State spaces as products of primitive components. Points are flat coordinate
// vectors; the product metric is the max over component distances.

#include <cstddef>
#include <string>
#include <vector>

namespace ergo {

using Point = std::vector<double>;

class MetricSpace {
 public:
  enum class Kind { Euclidean, Torus, Countable };

  struct Component {
    Kind kind;
    std::size_t dim;  // coordinate count of this component
  };

  static MetricSpace euclidean(std::size_t dim);
  // Flat torus, one angular coordinate per dim; coordinate distance
  // min(|dx|, 2pi - |dx|), combined within the component by max.
  static MetricSpace torus(std::size_t dim = 1);
  // Countable state set tagged by one real coordinate; distance |i - j|.
  static MetricSpace countable();
  static MetricSpace product(const MetricSpace& a, const MetricSpace& b);

  double distance(const Point& x, const Point& y) const;
  std::size_t dimension() const { return dim_; }
  const std::vector<Component>& components() const { return comps_; }
  // Canonical text form, e.g. "product(euclidean(1),torus(1))".
  std::string descriptor() const;
  static MetricSpace from_descriptor(const std::string& text);

  bool operator==(const MetricSpace& o) const;

 private:
  std::vector<Component> comps_;
  std::size_t dim_ = 0;
};

// Wraps an angle into [0, 2pi).
double wrap_angle(double theta);

}  // namespace ergo
