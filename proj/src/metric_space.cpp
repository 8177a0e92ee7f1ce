#include "ergo/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ergo {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

MetricSpace MetricSpace::euclidean(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("euclidean: dim must be >= 1");
  MetricSpace s;
  s.comps_.push_back({Kind::Euclidean, dim});
  s.dim_ = dim;
  return s;
}

MetricSpace MetricSpace::torus(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("torus: dim must be >= 1");
  MetricSpace s;
  s.comps_.push_back({Kind::Torus, dim});
  s.dim_ = dim;
  return s;
}

MetricSpace MetricSpace::countable() {
  MetricSpace s;
  s.comps_.push_back({Kind::Countable, 1});
  s.dim_ = 1;
  return s;
}

MetricSpace MetricSpace::product(const MetricSpace& a, const MetricSpace& b) {
  MetricSpace s;
  s.comps_ = a.comps_;
  s.comps_.insert(s.comps_.end(), b.comps_.begin(), b.comps_.end());
  s.dim_ = a.dim_ + b.dim_;
  return s;
}

double MetricSpace::distance(const Point& x, const Point& y) const {
  if (x.size() != dim_ || y.size() != dim_)
    throw std::invalid_argument("distance: point dimension mismatch");
  double dist = 0.0;
  std::size_t off = 0;
  for (const auto& c : comps_) {
    double cd = 0.0;
    switch (c.kind) {
      case Kind::Euclidean: {
        double ss = 0.0;
        for (std::size_t k = 0; k < c.dim; ++k) {
          const double d = x[off + k] - y[off + k];
          ss += d * d;
        }
        cd = std::sqrt(ss);
        break;
      }
      case Kind::Torus: {
        for (std::size_t k = 0; k < c.dim; ++k) {
          double d = std::abs(wrap_angle(x[off + k]) - wrap_angle(y[off + k]));
          d = std::min(d, kTwoPi - d);
          cd = std::max(cd, d);
        }
        break;
      }
      case Kind::Countable:
        cd = std::abs(x[off] - y[off]);
        break;
    }
    dist = std::max(dist, cd);
    off += c.dim;
  }
  return dist;
}

std::string MetricSpace::descriptor() const {
  auto one = [](const Component& c) {
    std::ostringstream os;
    switch (c.kind) {
      case Kind::Euclidean: os << "euclidean(" << c.dim << ")"; break;
      case Kind::Torus: os << "torus(" << c.dim << ")"; break;
      case Kind::Countable: os << "countable"; break;
    }
    return os.str();
  };
  if (comps_.size() == 1) return one(comps_[0]);
  std::string s = "product(";
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    if (i) s += ",";
    s += one(comps_[i]);
  }
  s += ")";
  return s;
}

namespace {

MetricSpace::Component parse_component(const std::string& tok) {
  auto dim_of = [&](const std::string& name) -> std::size_t {
    const auto open = tok.find('(');
    if (open == std::string::npos || tok.back() != ')')
      throw std::invalid_argument("bad space descriptor component: " + tok);
    const std::string inner = tok.substr(open + 1, tok.size() - open - 2);
    const long v = std::stol(inner);
    if (v <= 0) throw std::invalid_argument("bad dimension in descriptor: " + tok);
    (void)name;
    return static_cast<std::size_t>(v);
  };
  if (tok == "countable") return {MetricSpace::Kind::Countable, 1};
  if (tok.rfind("euclidean", 0) == 0) return {MetricSpace::Kind::Euclidean, dim_of("euclidean")};
  if (tok.rfind("torus", 0) == 0) return {MetricSpace::Kind::Torus, dim_of("torus")};
  throw std::invalid_argument("unknown space descriptor component: " + tok);
}

}  // namespace

MetricSpace MetricSpace::from_descriptor(const std::string& text) {
  std::vector<std::string> toks;
  if (text.rfind("product(", 0) == 0 && text.back() == ')') {
    const std::string inner = text.substr(8, text.size() - 9);
    std::string cur;
    int depth = 0;
    for (char ch : inner) {
      if (ch == '(') ++depth;
      if (ch == ')') --depth;
      if (ch == ',' && depth == 0) {
        toks.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) toks.push_back(cur);
  } else {
    toks.push_back(text);
  }
  MetricSpace s;
  for (const auto& t : toks) {
    const auto c = parse_component(t);
    s.comps_.push_back(c);
    s.dim_ += c.dim;
  }
  if (s.comps_.empty()) throw std::invalid_argument("empty space descriptor");
  return s;
}

bool MetricSpace::operator==(const MetricSpace& o) const {
  if (comps_.size() != o.comps_.size()) return false;
  for (std::size_t i = 0; i < comps_.size(); ++i)
    if (comps_[i].kind != o.comps_[i].kind || comps_[i].dim != o.comps_[i].dim) return false;
  return true;
}

}  // namespace ergo
