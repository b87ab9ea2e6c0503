#pragma once

// Test-side reference implementations. Everything here is deliberately
// independent of the library code paths it is used to check: integration is
// Romberg (the library uses adaptive Simpson / Gauss marching), linear solves
// are dense Gaussian elimination (the library uses the Thomas algorithm).

#include <cassert>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracles {

// Romberg integration on [a, b]. Assumes a smooth integrand.
template <class F>
double romberg(F&& f, double a, double b, int max_levels = 22, double rel_tol = 1e-13) {
  if (a == b) return 0.0;
  std::vector<double> row(static_cast<std::size_t>(max_levels), 0.0);
  double h = b - a;
  row[0] = 0.5 * h * (f(a) + f(b));
  for (int k = 1; k < max_levels; ++k) {
    h *= 0.5;
    double sum = 0.0;
    const long n_new = 1L << (k - 1);
    for (long i = 0; i < n_new; ++i) sum += f(a + (2 * i + 1) * h);
    std::vector<double> next(static_cast<std::size_t>(max_levels), 0.0);
    next[0] = 0.5 * row[0] + h * sum;
    double p4 = 1.0;
    for (int j = 1; j <= k; ++j) {
      p4 *= 4.0;
      next[j] = next[j - 1] + (next[j - 1] - row[j - 1]) / (p4 - 1.0);
    }
    if (k > 3 && std::abs(next[k] - row[k - 1]) <= rel_tol * (1.0 + std::abs(next[k]))) return next[k];
    row = next;
  }
  return row[max_levels - 1];
}

// Nested double quadrature for the normalized antiderivative with
// g''(r) = w(r), g(1) = g'(1) = 0: g(r) = \int_1^r \int_1^t w(s) ds dt.
// Kept as a genuinely nested evaluation (inner Romberg per outer node).
template <class W>
double double_integral_antiderivative(W&& w, double r) {
  auto inner = [&](double t) { return romberg(w, 1.0, t); };
  return romberg(inner, 1.0, r);
}

// Dense Gaussian elimination with partial pivoting; A is row-major n x n.
inline std::vector<double> dense_solve(std::vector<double> A, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  assert(A.size() == n * n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
    if (A[piv * n + col] == 0.0) throw std::runtime_error("singular matrix in dense_solve");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(A[piv * n + c], A[col * n + c]);
      std::swap(rhs[piv], rhs[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double m = A[r * n + col] / A[col * n + col];
      if (m == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) A[r * n + c] -= m * A[col * n + c];
      rhs[r] -= m * rhs[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = rhs[ri];
    for (std::size_t c = ri + 1; c < n; ++c) s -= A[ri * n + c] * x[c];
    x[ri] = s / A[ri * n + ri];
  }
  return x;
}

// Centered first/second finite differences.
template <class F>
double fd1(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

template <class F>
double fd2(F&& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Deterministic positive random fields for property tests.
inline std::vector<double> random_positive_field(std::size_t n, unsigned seed, double lo = 0.2,
                                                 double hi = 4.0) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> u(n);
  for (auto& x : u) x = dist(gen);
  return u;
}

inline std::vector<double> random_field(std::size_t n, unsigned seed, double lo = -2.0,
                                        double hi = 2.0) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> w(n);
  for (auto& x : w) x = dist(gen);
  return w;
}

// Least-squares slope of log(err) against log(h); used to cross-check the
// library's order estimator.
inline double ls_order(const std::vector<double>& h, const std::vector<double>& err) {
  assert(h.size() == err.size() && h.size() >= 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracles
