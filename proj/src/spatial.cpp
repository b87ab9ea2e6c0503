#include "ks1d/spatial.hpp"

#include <cmath>
#include <stdexcept>

namespace ks1d {

void diffusive_flux(const Grid& grid, std::span<const double> u, const Nonlinearity& nl,
                    std::span<double> flux) {
  const std::size_t n = grid.size();
  if (u.size() != n || flux.size() != n + 1)
    throw std::invalid_argument("diffusive_flux: size mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (!(u[i] > 0.0)) throw std::domain_error("diffusive_flux: u must be strictly positive");
  flux[0] = 0.0;
  flux[n] = 0.0;
  double lam_prev = nl.lambda(u[0]);
  bool ok = true;
  for (std::size_t i = 1; i < n; ++i) {
    const double lam = nl.lambda(u[i]);
    flux[i] = (lam - lam_prev) / grid.dx;
    ok = ok && std::isfinite(flux[i]);
    lam_prev = lam;
  }
  if (!ok) throw flux_error("diffusive_flux: non-finite Lambda difference");
}

void diffusive_flux_from_lambda(const Grid& grid, std::span<const double> lambda_u,
                                std::span<double> flux) {
  const std::size_t n = grid.size();
  flux[0] = 0.0;
  flux[n] = 0.0;
  bool ok = true;
  for (std::size_t i = 1; i < n; ++i) {
    flux[i] = (lambda_u[i] - lambda_u[i - 1]) / grid.dx;
    ok = ok && std::isfinite(flux[i]);
  }
  if (!ok) throw flux_error("diffusive_flux: non-finite Lambda difference");
}

void advective_flux(const Grid& grid, std::span<const double> u, std::span<const double> v,
                    AdvectionScheme scheme, std::span<double> flux) {
  const std::size_t n = grid.size();
  if (u.size() != n || v.size() != n || flux.size() != n + 1)
    throw std::invalid_argument("advective_flux: size mismatch");
  flux[0] = 0.0;
  flux[n] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double g = (v[i] - v[i - 1]) / grid.dx;
    double uval;
    if (scheme == AdvectionScheme::Upwind) {
      uval = (g > 0.0) ? u[i - 1] : u[i];
    } else {
      uval = 0.5 * (u[i - 1] + u[i]);
    }
    flux[i] = g * uval;
  }
}

void divergence(const Grid& grid, std::span<const double> flux, std::span<double> rate) {
  const std::size_t n = grid.size();
  if (flux.size() != n + 1 || rate.size() != n)
    throw std::invalid_argument("divergence: size mismatch");
  for (std::size_t i = 0; i < n; ++i) rate[i] = (flux[i + 1] - flux[i]) / grid.dx;
}

void discrete_laplacian(const Grid& grid, std::span<const double> w, std::span<double> out) {
  const std::size_t n = grid.size();
  if (w.size() != n || out.size() != n)
    throw std::invalid_argument("discrete_laplacian: size mismatch");
  // difference of interface gradients, zero at the boundary
  double g_prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g_next = (i + 1 < n) ? (w[i + 1] - w[i]) / grid.dx : 0.0;
    out[i] = (g_next - g_prev) / grid.dx;
    g_prev = g_next;
  }
}

HelmholtzSolver::HelmholtzSolver(const Grid& grid)
    : grid_(grid),
      sub_(grid.size()),
      diag_(grid.size()),
      sup_(grid.size()),
      thomas_(grid.size()) {
  const std::size_t n = grid.size();
  const double w = 1.0 / (grid.dx * grid.dx);
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = (i == 0), right = (i + 1 == n);
    sub_[i] = left ? 0.0 : -w;
    sup_[i] = right ? 0.0 : -w;
    diag_[i] = 1.0 + ((left || right) ? w : 2.0 * w);
  }
}

void HelmholtzSolver::solve(std::span<const double> u, std::span<double> v) {
  if (u.size() != grid_.size() || v.size() != grid_.size())
    throw std::invalid_argument("helmholtz: size mismatch");
  // Solve for the increment against the guess v = u: the residual of the
  // guess is exactly Lap u in flux form, so constant states (where every
  // interface gradient vanishes bitwise) are reproduced exactly.
  const std::size_t n = grid_.size();
  if (rhs_.size() < n) {
    rhs_.resize(n);
    delta_.resize(n);
  }
  discrete_laplacian(grid_, u, rhs_);
  thomas_.solve(sub_, diag_, sup_, std::span<const double>(rhs_.data(), n),
                std::span<double>(delta_.data(), n));
  for (std::size_t i = 0; i < n; ++i) v[i] = u[i] + delta_[i];
}

}  // namespace ks1d
