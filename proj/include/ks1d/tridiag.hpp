#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ks1d {

// Thomas algorithm for A x = d with sub/main/super diagonals (a, b, c);
// a[0] and c[n-1] are ignored. No pivoting: callers supply diagonally
// dominant systems. Internal accumulation in long double keeps the residual
// of the stiff Helmholtz rows near roundoff at fine meshes.
class TridiagSolver {
 public:
  explicit TridiagSolver(std::size_t n) : cw_(n), dw_(n) {}

  void solve(std::span<const double> sub, std::span<const double> diag,
             std::span<const double> sup, std::span<const double> rhs, std::span<double> x);

 private:
  std::vector<long double> cw_, dw_;
};

// Block-tridiagonal solve with 2x2 blocks, used by the coupled Newton step.
// Layout: per cell i a block row  A_i X_{i-1} + B_i X_i + C_i X_{i+1} = R_i
// with X_i in R^2. Blocks are stored row-major as double[4].
class BlockTridiagSolver {
 public:
  explicit BlockTridiagSolver(std::size_t n_cells);

  // All spans have n_cells entries of block data; R/X have 2*n_cells scalars.
  // A[0] and C[n-1] are ignored. Returns false if a pivot block is singular.
  bool solve(std::span<const double> A, std::span<const double> B, std::span<const double> C,
             std::span<const double> R, std::span<double> X);

 private:
  std::vector<double> cw_;  // n blocks of 4
  std::vector<double> dw_;  // n vectors of 2
};

}  // namespace ks1d
