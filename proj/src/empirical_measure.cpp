#include "ergo/empirical_measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ergo {

void EmpiricalMeasure::add(Point x, double weight) {
  if (!(weight > 0.0) || !std::isfinite(weight))
    throw std::invalid_argument("EmpiricalMeasure::add: weight must be finite and > 0");
  if (!atoms_.empty() && x.size() != atoms_.front().point.size())
    throw std::invalid_argument("EmpiricalMeasure::add: atom dimension mismatch");
  for (double c : x)
    if (!std::isfinite(c)) throw std::invalid_argument("EmpiricalMeasure::add: non-finite coordinate");
  atoms_.push_back({std::move(x), weight});
  total_ += weight;
}

bool EmpiricalMeasure::is_probability(double tol) const {
  return std::abs(total_ - 1.0) <= tol;
}

double EmpiricalMeasure::integrate(const TestFunction& f) const {
  if (atoms_.empty()) throw std::runtime_error("integrate: empty measure");
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight * f(a.point);
  return s / total_;
}

double EmpiricalMeasure::ball_mass(const MetricSpace& space, const Point& z, double eps) const {
  if (atoms_.empty()) throw std::runtime_error("ball_mass: empty measure");
  double s = 0.0;
  for (const auto& a : atoms_)
    if (space.distance(a.point, z) < eps) s += a.weight;
  return s / total_;
}

double EmpiricalMeasure::set_mass(const MetricSpace& space, const std::vector<Point>& centers,
                                  double eps) const {
  if (atoms_.empty()) throw std::runtime_error("set_mass: empty measure");
  if (centers.empty()) throw std::invalid_argument("set_mass: empty center set");
  double s = 0.0;
  for (const auto& a : atoms_) {
    for (const auto& z : centers) {
      if (space.distance(a.point, z) < eps) {
        s += a.weight;
        break;
      }
    }
  }
  return s / total_;
}

EmpiricalMeasure EmpiricalMeasure::merged() const {
  std::map<std::vector<double>, double> acc;
  for (const auto& a : atoms_) acc[a.point] += a.weight;
  EmpiricalMeasure out;
  for (auto& [p, w] : acc) out.add(p, w);
  return out;
}

void EmpiricalMeasure::normalize() {
  if (atoms_.empty() || !(total_ > 0.0)) throw std::runtime_error("normalize: empty measure");
  for (auto& a : atoms_) a.weight /= total_;
  total_ = 1.0;
}

EmpiricalMeasure EmpiricalMeasure::pruned(double min_weight) const {
  if (atoms_.empty()) throw std::runtime_error("pruned: empty measure");
  EmpiricalMeasure out;
  for (const auto& a : atoms_)
    if (a.weight / total_ >= min_weight) out.add(a.point, a.weight);
  if (out.empty()) throw std::runtime_error("pruned: threshold removed every atom");
  out.normalize();
  return out;
}

void EmpiricalMeasure::write_csv(std::ostream& os) const {
  if (atoms_.empty()) throw std::runtime_error("write_csv: empty measure");
  const std::size_t d = atoms_.front().point.size();
  for (std::size_t k = 0; k < d; ++k) os << "c" << k << ",";
  os << "weight\n";
  os.precision(17);
  for (const auto& a : atoms_) {
    for (double c : a.point) os << c << ",";
    os << a.weight << "\n";
  }
}

std::string EmpiricalMeasure::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

EmpiricalMeasure EmpiricalMeasure::from_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("from_csv: missing header");
  EmpiricalMeasure out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() < 2) throw std::runtime_error("from_csv: row needs coords and weight");
    Point p(vals.begin(), vals.end() - 1);
    out.add(std::move(p), vals.back());
  }
  return out;
}

std::string EmpiricalMeasure::to_json(const MetricSpace& space) const {
  nlohmann::json j;
  j["space"] = space.descriptor();
  j["total_weight"] = total_;
  auto& arr = j["atoms"] = nlohmann::json::array();
  for (const auto& a : atoms_) arr.push_back({{"point", a.point}, {"weight", a.weight}});
  return j.dump(2);
}

EmpiricalMeasure EmpiricalMeasure::from_json(const std::string& text, MetricSpace* space_out) {
  const auto j = nlohmann::json::parse(text);
  if (space_out) *space_out = MetricSpace::from_descriptor(j.at("space").get<std::string>());
  EmpiricalMeasure out;
  for (const auto& a : j.at("atoms"))
    out.add(a.at("point").get<std::vector<double>>(), a.at("weight").get<double>());
  return out;
}

EmpiricalMeasure quantile_binned(const EmpiricalMeasure& mu, std::size_t n_bins,
                                 double* deviation_out) {
  if (mu.empty()) throw std::runtime_error("quantile_binned: empty measure");
  if (mu.atoms().front().point.size() != 1)
    throw std::invalid_argument("quantile_binned: only 1-d measures supported");
  if (n_bins == 0) throw std::invalid_argument("quantile_binned: n_bins must be >= 1");

  std::vector<std::pair<double, double>> xs;  // (coordinate, weight)
  xs.reserve(mu.size());
  for (const auto& a : mu.atoms()) xs.emplace_back(a.point[0], a.weight);
  std::sort(xs.begin(), xs.end());

  const double total = mu.total_weight();
  const double per_bin = total / static_cast<double>(n_bins);
  EmpiricalMeasure out;
  double dev_sum = 0.0;

  std::size_t i = 0;
  double carry = 0.0;  // weight of xs[i] already assigned to earlier bins
  for (std::size_t b = 0; b < n_bins && i < xs.size(); ++b) {
    double need = (b + 1 == n_bins) ? std::numeric_limits<double>::infinity() : per_bin;
    double wsum = 0.0, xsum = 0.0;
    std::vector<std::pair<double, double>> members;
    while (i < xs.size() && wsum < need) {
      const double avail = xs[i].second - carry;
      const double take = std::min(avail, need - wsum);
      wsum += take;
      xsum += take * xs[i].first;
      members.emplace_back(xs[i].first, take);
      carry += take;
      if (carry >= xs[i].second - 1e-300) {
        carry = 0.0;
        ++i;
      }
      if (!(need < std::numeric_limits<double>::infinity()) && i >= xs.size()) break;
    }
    if (wsum <= 0.0) continue;
    const double mean = xsum / wsum;
    for (const auto& [x, w] : members) dev_sum += w * std::abs(x - mean);
    out.add({mean}, wsum);
  }
  if (deviation_out) *deviation_out = dev_sum / total;
  return out;
}

}  // namespace ergo
