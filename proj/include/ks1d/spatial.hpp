#pragma once

// Conservative finite-volume operators on the uniform cell mesh with
// homogeneous Neumann boundaries. Diffusion is discretized through interface
// differences of Lambda(u), so the chain rule a(u) u_x = (Lambda(u))_x holds
// exactly at the discrete level; all boundary interface fluxes are exactly
// zero, which makes the dx-weighted divergence telescope to zero.

#include <span>

#include "ks1d/grid.hpp"
#include "ks1d/nonlinearity.hpp"
#include "ks1d/tridiag.hpp"

namespace ks1d {

enum class AdvectionScheme { Upwind, Central };

// Interface values of a(u) u_x realized as differences of Lambda(u).
// flux has grid.interfaces() entries; flux[0] = flux[N] = 0.
// Throws std::domain_error on nonpositive u, flux_error on non-finite values.
void diffusive_flux(const Grid& grid, std::span<const double> u, const Nonlinearity& nl,
                    std::span<double> flux);

// Same, with Lambda(u) precomputed by the caller (hot path).
void diffusive_flux_from_lambda(const Grid& grid, std::span<const double> lambda_u,
                                std::span<double> flux);

// Interface values of u v_x with the drift g = dv/dx at the interface;
// Upwind picks the upstream cell value, Central the arithmetic mean.
void advective_flux(const Grid& grid, std::span<const double> u, std::span<const double> v,
                    AdvectionScheme scheme, std::span<double> flux);

// Conservative difference: rate_i = (flux_{i+1/2} - flux_{i-1/2}) / dx.
void divergence(const Grid& grid, std::span<const double> flux, std::span<double> rate);

// Neumann discrete Laplacian (difference of interface gradients).
void discrete_laplacian(const Grid& grid, std::span<const double> w, std::span<double> out);

// Solves (I - Lap_h) v = u by the Thomas algorithm.
class HelmholtzSolver {
 public:
  explicit HelmholtzSolver(const Grid& grid);
  void solve(std::span<const double> u, std::span<double> v);

 private:
  Grid grid_;
  std::vector<double> sub_, diag_, sup_;
  std::vector<double> rhs_, delta_;
  TridiagSolver thomas_;
};

struct flux_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ks1d
