#include "ks1d/tridiag.hpp"

#include <cmath>
#include <stdexcept>

namespace ks1d {

void TridiagSolver::solve(std::span<const double> sub, std::span<const double> diag,
                          std::span<const double> sup, std::span<const double> rhs,
                          std::span<double> x) {
  const std::size_t n = diag.size();
  if (n == 0 || sub.size() != n || sup.size() != n || rhs.size() != n || x.size() != n)
    throw std::invalid_argument("tridiag: inconsistent sizes");
  if (cw_.size() < n) {
    cw_.resize(n);
    dw_.resize(n);
  }
  long double beta = diag[0];
  if (beta == 0.0L) throw std::runtime_error("tridiag: zero pivot");
  cw_[0] = sup[0] / beta;
  dw_[0] = rhs[0] / beta;
  for (std::size_t i = 1; i < n; ++i) {
    beta = static_cast<long double>(diag[i]) - static_cast<long double>(sub[i]) * cw_[i - 1];
    if (beta == 0.0L) throw std::runtime_error("tridiag: zero pivot");
    cw_[i] = static_cast<long double>(sup[i]) / beta;
    dw_[i] = (static_cast<long double>(rhs[i]) - static_cast<long double>(sub[i]) * dw_[i - 1]) / beta;
  }
  long double xi = dw_[n - 1];
  x[n - 1] = static_cast<double>(xi);
  for (std::size_t i = n - 1; i-- > 0;) {
    xi = dw_[i] - cw_[i] * xi;
    x[i] = static_cast<double>(xi);
  }
}

namespace {

// Invert a 2x2 block in place; returns false when singular.
inline bool inv2(const double m[4], double out[4]) {
  const double det = m[0] * m[3] - m[1] * m[2];
  if (det == 0.0 || !std::isfinite(det)) return false;
  const double inv = 1.0 / det;
  out[0] = m[3] * inv;
  out[1] = -m[1] * inv;
  out[2] = -m[2] * inv;
  out[3] = m[0] * inv;
  return true;
}

inline void mm2(const double a[4], const double b[4], double out[4]) {
  out[0] = a[0] * b[0] + a[1] * b[2];
  out[1] = a[0] * b[1] + a[1] * b[3];
  out[2] = a[2] * b[0] + a[3] * b[2];
  out[3] = a[2] * b[1] + a[3] * b[3];
}

inline void mv2(const double a[4], const double v[2], double out[2]) {
  out[0] = a[0] * v[0] + a[1] * v[1];
  out[1] = a[2] * v[0] + a[3] * v[1];
}

}  // namespace

BlockTridiagSolver::BlockTridiagSolver(std::size_t n_cells)
    : cw_(4 * n_cells), dw_(2 * n_cells) {}

bool BlockTridiagSolver::solve(std::span<const double> A, std::span<const double> B,
                               std::span<const double> C, std::span<const double> R,
                               std::span<double> X) {
  const std::size_t n = B.size() / 4;
  if (n == 0 || A.size() != 4 * n || C.size() != 4 * n || R.size() != 2 * n || X.size() != 2 * n)
    throw std::invalid_argument("block tridiag: inconsistent sizes");
  if (cw_.size() < 4 * n) {
    cw_.resize(4 * n);
    dw_.resize(2 * n);
  }

  double inv[4], tmp[4], tv[2];
  if (!inv2(&B[0], inv)) return false;
  mm2(inv, &C[0], &cw_[0]);
  mv2(inv, &R[0], &dw_[0]);

  for (std::size_t i = 1; i < n; ++i) {
    // pivot block: B_i - A_i * cw_{i-1}
    double piv[4];
    mm2(&A[4 * i], &cw_[4 * (i - 1)], tmp);
    for (int k = 0; k < 4; ++k) piv[k] = B[4 * i + k] - tmp[k];
    if (!inv2(piv, inv)) return false;
    mm2(inv, &C[4 * i], &cw_[4 * i]);
    mv2(&A[4 * i], &dw_[2 * (i - 1)], tv);
    const double rv[2] = {R[2 * i] - tv[0], R[2 * i + 1] - tv[1]};
    mv2(inv, rv, &dw_[2 * i]);
  }

  X[2 * (n - 1)] = dw_[2 * (n - 1)];
  X[2 * (n - 1) + 1] = dw_[2 * (n - 1) + 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    mv2(&cw_[4 * i], &X[2 * (i + 1)], tv);
    X[2 * i] = dw_[2 * i] - tv[0];
    X[2 * i + 1] = dw_[2 * i + 1] - tv[1];
  }
  return true;
}

}  // namespace ks1d
