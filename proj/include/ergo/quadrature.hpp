#pragma once

// Deterministic 1-d quadrature: adaptive Simpson with a hard panel budget,
// plus fixed-grid trapezoid helpers.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

namespace ergo {

inline constexpr std::size_t kSimpsonMaxPanels = std::size_t{1} << 20;

namespace detail {

struct SimpsonState {
  const std::function<double(double)>* f;
  std::size_t panels = 0;
  std::size_t max_panels = kSimpsonMaxPanels;
};

inline double simpson_rec(SimpsonState& st, double a, double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  if (++st.panels > st.max_panels)
    throw std::runtime_error("adaptive_simpson: panel budget exhausted");
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = (*st.f)(lm), frm = (*st.f)(rm);
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double s2 = left + right;
  if (depth > 0 && std::abs(s2 - whole) <= 15.0 * tol)
    return s2 + (s2 - whole) / 15.0;
  return simpson_rec(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_rec(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

// Integral of f over [a,b] to absolute tolerance tol. Throws if the panel
// budget (default 2^20) is exhausted before the tolerance is met.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, std::size_t max_panels = kSimpsonMaxPanels) {
  if (!(tol > 0.0)) throw std::invalid_argument("adaptive_simpson: tol must be > 0");
  if (a == b) return 0.0;
  detail::SimpsonState st{&f, 0, max_panels};
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(st, a, b, fa, fm, fb, whole, tol, 0);
}

// Trapezoid rule on n_panels equal panels.
inline double trapezoid(const std::function<double(double)>& f, double a, double b,
                        std::size_t n_panels) {
  if (n_panels == 0) throw std::invalid_argument("trapezoid: need at least one panel");
  const double h = (b - a) / static_cast<double>(n_panels);
  double s = 0.5 * (f(a) + f(b));
  for (std::size_t k = 1; k < n_panels; ++k) s += f(a + h * static_cast<double>(k));
  return s * h;
}

}  // namespace ergo
