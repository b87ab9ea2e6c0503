#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace ks1d::quadrature {

namespace detail {

template <class F>
double simpson_split(F& f, double a, double m, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double h6 = (b - a) / 12.0;
  const double left = h6 * (fa + 4.0 * flm + fm);
  const double right = h6 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_split(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_split(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on [a, b]. The tolerance is relative to a coarse estimate
// of the integral magnitude, with abs_floor as a lower cutoff so that
// integrals through zero still terminate.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol, double abs_floor = 1e-300,
                        int max_depth = 52) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double tol = std::max(abs_floor, rel_tol * std::abs(whole));
  const double result =
      detail::simpson_split(f, a, m, b, fa, fm, fb, whole, std::max(tol, 1e-300), max_depth);
  if (!std::isfinite(result)) throw std::runtime_error("adaptive_simpson: non-finite integral");
  return result;
}

// 7-point Gauss-Legendre rule on [a, b]; exact through degree 13.
template <class F>
double gauss7(F&& f, double a, double b) {
  static constexpr double x[7] = {-0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
                                  0.0,                 0.4058451513773972,  0.7415311855993945,
                                  0.9491079123427585};
  static constexpr double w[7] = {0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
                                  0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
                                  0.1294849661688697};
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 7; ++i) s += w[i] * f(c + h * x[i]);
  return s * h;
}

}  // namespace ks1d::quadrature
