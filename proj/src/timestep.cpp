#include "ks1d/timestep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ks1d {

namespace {

bool all_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

void rhs_u(const Grid& grid, const State& s, const Nonlinearity& nl, AdvectionScheme scheme,
           std::span<double> out) {
  const std::size_t n = grid.size();
  std::vector<double> dflux(n + 1), aflux(n + 1), net(n + 1);
  diffusive_flux(grid, s.u, nl, dflux);
  advective_flux(grid, s.u, s.v, scheme, aflux);
  for (std::size_t i = 0; i <= n; ++i) net[i] = dflux[i] - aflux[i];
  divergence(grid, net, out);
}

void rhs_v(const Grid& grid, const State& s, std::span<double> out) {
  const std::size_t n = grid.size();
  discrete_laplacian(grid, s.v, out);
  for (std::size_t i = 0; i < n; ++i) out[i] += s.u[i] - s.v[i];
}

TimeStepper::TimeStepper(const Grid& grid, const Scenario& scenario)
    : grid_(grid),
      sc_(scenario),
      helmholtz_(grid),
      thomas_(grid.size()),
      block_(grid.size()),
      dflux_(grid.interfaces()),
      aflux_(grid.interfaces()),
      lam_(grid.size()),
      a_(grid.size()),
      rate_(grid.size()),
      rate2_(grid.size()),
      k1u_(grid.size()),
      k1v_(grid.size()),
      k2u_(grid.size()),
      k2v_(grid.size()),
      su_(grid.size()),
      sv_(grid.size()),
      w_(grid.size()),
      g_(grid.size()),
      delta_(grid.size()),
      sub_(grid.size()),
      diag_(grid.size()),
      sup_(grid.size()),
      rexp_(grid.size()),
      bA_(4 * grid.size()),
      bB_(4 * grid.size()),
      bC_(4 * grid.size()),
      bR_(2 * grid.size()),
      bX_(2 * grid.size()) {
  control_.dt = scenario.dt_initial;
}

bool TimeStepper::positivity_ok(std::span<const double> u) const {
  for (double ui : u)
    if (!(ui >= sc_.positivity_floor)) return false;
  return true;
}

bool TimeStepper::eval_rhs_u(std::span<const double> u, std::span<const double> v, double t,
                             std::span<double> out, const SourceHook* src) {
  const std::size_t n = grid_.size();
  sc_.nonlinearity.lambda_into(u, lam_);
  try {
    diffusive_flux_from_lambda(grid_, lam_, dflux_);
  } catch (const flux_error&) {
    return false;
  }
  aflux_[0] = 0.0;
  aflux_[n] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double g = (v[i] - v[i - 1]) / grid_.dx;
    const double uval = (sc_.advection_scheme == AdvectionScheme::Upwind)
                            ? ((g > 0.0) ? u[i - 1] : u[i])
                            : 0.5 * (u[i - 1] + u[i]);
    aflux_[i] = g * uval;
  }
  for (std::size_t i = 0; i < n; ++i)
    out[i] = ((dflux_[i + 1] - aflux_[i + 1]) - (dflux_[i] - aflux_[i])) / grid_.dx;
  if (src && src->active())
    for (std::size_t i = 0; i < n; ++i) out[i] += src->s_u(t, grid_.center(static_cast<int>(i)));
  return all_finite(out);
}

void TimeStepper::eval_rhs_v(std::span<const double> u, std::span<const double> v, double t,
                             std::span<double> out, const SourceHook* src) {
  const std::size_t n = grid_.size();
  discrete_laplacian(grid_, v, out);
  for (std::size_t i = 0; i < n; ++i) out[i] += u[i] - v[i];
  if (src && src->active() && src->s_v)
    for (std::size_t i = 0; i < n; ++i) out[i] += src->s_v(t, grid_.center(static_cast<int>(i)));
}

double TimeStepper::cfl_limit(const State& state) const {
  const std::size_t n = grid_.size();
  if (sc_.stepper == StepperKind::FullyImplicit) return std::numeric_limits<double>::infinity();
  double gmax = 0.0;
  for (std::size_t i = 1; i < n; ++i)
    gmax = std::max(gmax, std::abs(state.v[i] - state.v[i - 1]) / grid_.dx);
  const double adv = (gmax > 0.0) ? grid_.dx / gmax : std::numeric_limits<double>::infinity();
  if (sc_.stepper == StepperKind::IMEX1) return adv;
  double amax = 0.0;
  for (std::size_t i = 0; i < n; ++i) amax = std::max(amax, sc_.nonlinearity.a(state.u[i]));
  const double dx2 = grid_.dx * grid_.dx;
  const double diff_u =
      (amax > 0.0) ? dx2 / (2.0 * amax) : std::numeric_limits<double>::infinity();
  return std::min({diff_u, adv, 0.5 * dx2});
}

TimeStepper::Attempt TimeStepper::attempt(const State& state, double dt, State& next,
                                          const SourceHook* src) {
  if (!(dt > 0.0)) return {false, false, 0, "nonpositive dt"};
  switch (sc_.stepper) {
    case StepperKind::ExplicitRK:
      return heun(state, dt, next, src);
    case StepperKind::IMEX1:
      return imex1(state, dt, next, src);
    case StepperKind::FullyImplicit:
      return fully_implicit(state, dt, next, src);
  }
  return {false, false, 0, "unknown stepper"};
}

TimeStepper::Attempt TimeStepper::heun(const State& state, double dt, State& next,
                                       const SourceHook* src) {
  const std::size_t n = grid_.size();
  next.u.resize(n);
  next.v.resize(n);
  const bool pe = (sc_.variant == Variant::ParabolicElliptic);

  if (!eval_rhs_u(state.u, state.v, state.t, k1u_, src))
    return {false, false, 0, "non-finite flux (stage 1)"};
  if (!pe) eval_rhs_v(state.u, state.v, state.t, k1v_, src);

  // predictor
  for (std::size_t i = 0; i < n; ++i) w_[i] = state.u[i] + dt * k1u_[i];
  if (!positivity_ok(w_)) return {false, true, 0, "positivity violated at predictor stage"};
  if (pe) {
    helmholtz_.solve(w_, rate_);  // rate_ doubles as predictor v
  } else {
    for (std::size_t i = 0; i < n; ++i) rate_[i] = state.v[i] + dt * k1v_[i];
  }

  if (!eval_rhs_u(w_, rate_, state.t + dt, k2u_, src))
    return {false, false, 0, "non-finite flux (stage 2)"};
  if (!pe) eval_rhs_v(w_, rate_, state.t + dt, k2v_, src);

  for (std::size_t i = 0; i < n; ++i) next.u[i] = state.u[i] + 0.5 * dt * (k1u_[i] + k2u_[i]);
  if (!all_finite(next.u)) return {false, false, 0, "non-finite state"};
  if (!positivity_ok(next.u)) return {false, true, 0, "positivity violated"};
  if (pe) {
    helmholtz_.solve(next.u, next.v);
  } else {
    for (std::size_t i = 0; i < n; ++i) next.v[i] = state.v[i] + 0.5 * dt * (k1v_[i] + k2v_[i]);
    if (!all_finite(next.v)) return {false, false, 0, "non-finite state"};
  }
  next.t = state.t + dt;
  return {true, false, 0, ""};
}

TimeStepper::Attempt TimeStepper::imex1(const State& state, double dt, State& next,
                                        const SourceHook* src) {
  const std::size_t n = grid_.size();
  next.u.resize(n);
  next.v.resize(n);
  const bool pe = (sc_.variant == Variant::ParabolicElliptic);
  const double dx2 = grid_.dx * grid_.dx;

  // explicit advection from the current state
  aflux_[0] = 0.0;
  aflux_[n] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double g = (state.v[i] - state.v[i - 1]) / grid_.dx;
    const double uval = (sc_.advection_scheme == AdvectionScheme::Upwind)
                            ? ((g > 0.0) ? state.u[i - 1] : state.u[i])
                            : 0.5 * (state.u[i - 1] + state.u[i]);
    aflux_[i] = g * uval;
  }
  for (std::size_t i = 0; i < n; ++i) {
    rexp_[i] = state.u[i] - dt * (aflux_[i + 1] - aflux_[i]) / grid_.dx;
    if (src && src->active()) rexp_[i] += dt * src->s_u(state.t, grid_.center(static_cast<int>(i)));
  }
  if (!all_finite(rexp_)) return {false, false, 0, "non-finite advection"};

  double rscale = 0.0;
  for (std::size_t i = 0; i < n; ++i) rscale = std::max(rscale, std::abs(rexp_[i]));

  // Newton on w - dt * Lap Lambda(w) = rexp
  std::copy(state.u.begin(), state.u.end(), w_.begin());
  bool converged = false;
  int iters = 0;
  for (; iters < control_.newton_max_iter; ++iters) {
    sc_.nonlinearity.lambda_into(w_, lam_);
    try {
      diffusive_flux_from_lambda(grid_, lam_, dflux_);
    } catch (const flux_error&) {
      return {false, true, iters, "non-finite Lambda in Newton iteration"};
    }
    divergence(grid_, dflux_, rate2_);
    double gnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g_[i] = w_[i] - dt * rate2_[i] - rexp_[i];
      gnorm = std::max(gnorm, std::abs(g_[i]));
    }
    if (gnorm <= control_.newton_tol * (1.0 + rscale)) {
      converged = true;
      break;
    }
    sc_.nonlinearity.a_into(w_, a_);
    for (std::size_t i = 0; i < n; ++i) {
      const bool left = (i == 0), right = (i + 1 == n);
      const double cnt = (left || right) ? 1.0 : 2.0;
      sub_[i] = left ? 0.0 : -dt * a_[i - 1] / dx2;
      sup_[i] = right ? 0.0 : -dt * a_[i + 1] / dx2;
      diag_[i] = 1.0 + dt * cnt * a_[i] / dx2;
      g_[i] = -g_[i];
    }
    thomas_.solve(sub_, diag_, sup_, g_, delta_);
    // backtrack to keep the iterate strictly positive
    double theta = 1.0;
    bool ok = false;
    for (int ls = 0; ls < 7; ++ls) {
      double mn = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) mn = std::min(mn, w_[i] + theta * delta_[i]);
      if (mn > 0.0) {
        ok = true;
        break;
      }
      theta *= 0.5;
    }
    if (!ok) return {false, true, iters, "Newton iterate left the positive cone"};
    for (std::size_t i = 0; i < n; ++i) w_[i] += theta * delta_[i];
  }
  if (!converged) return {false, true, iters, "Newton did not converge"};

  // conservative re-application of the converged fluxes
  sc_.nonlinearity.lambda_into(w_, lam_);
  diffusive_flux_from_lambda(grid_, lam_, dflux_);
  divergence(grid_, dflux_, rate2_);
  for (std::size_t i = 0; i < n; ++i) next.u[i] = rexp_[i] + dt * rate2_[i];
  if (!all_finite(next.u)) return {false, false, iters, "non-finite state"};
  if (!positivity_ok(next.u)) return {false, true, iters, "positivity violated"};

  if (pe) {
    helmholtz_.solve(next.u, next.v);
  } else {
    // backward Euler for v in increment form: with d = v^{n+1} - v^n,
    //   ((1 + dt) I - dt Lap) d = dt (Lap v^n - v^n + u^{n+1} + S_v),
    // whose right side vanishes exactly on steady constant pairs.
    discrete_laplacian(grid_, state.v, rate_);
    for (std::size_t i = 0; i < n; ++i) {
      const bool left = (i == 0), right = (i + 1 == n);
      const double cnt = (left || right) ? 1.0 : 2.0;
      sub_[i] = left ? 0.0 : -dt / dx2;
      sup_[i] = right ? 0.0 : -dt / dx2;
      diag_[i] = 1.0 + dt + dt * cnt / dx2;
      g_[i] = dt * (rate_[i] - state.v[i] + next.u[i]);
      if (src && src->active() && src->s_v)
        g_[i] += dt * src->s_v(state.t + dt, grid_.center(static_cast<int>(i)));
    }
    thomas_.solve(sub_, diag_, sup_, g_, delta_);
    for (std::size_t i = 0; i < n; ++i) next.v[i] = state.v[i] + delta_[i];
  }
  next.t = state.t + dt;
  return {true, false, iters, ""};
}

TimeStepper::Attempt TimeStepper::fully_implicit(const State& state, double dt, State& next,
                                                 const SourceHook* src) {
  const std::size_t n = grid_.size();
  next.u.resize(n);
  next.v.resize(n);
  const bool pe = (sc_.variant == Variant::ParabolicElliptic);
  const double dx2 = grid_.dx * grid_.dx;
  const double invdx = 1.0 / grid_.dx;

  // iterate vectors: wu in w_, wv in rate_
  std::copy(state.u.begin(), state.u.end(), w_.begin());
  std::copy(state.v.begin(), state.v.end(), rate_.begin());

  if (src && src->active()) {
    for (std::size_t i = 0; i < n; ++i) {
      su_[i] = src->s_u(state.t + dt, grid_.center(static_cast<int>(i)));
      sv_[i] = src->s_v ? src->s_v(state.t + dt, grid_.center(static_cast<int>(i))) : 0.0;
    }
  } else {
    std::fill(su_.begin(), su_.end(), 0.0);
    std::fill(sv_.begin(), sv_.end(), 0.0);
  }

  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    scale = std::max({scale, std::abs(state.u[i]), std::abs(state.v[i])});

  const bool upwind = (sc_.advection_scheme == AdvectionScheme::Upwind);
  bool converged = false;
  int iters = 0;
  for (; iters < control_.newton_max_iter; ++iters) {
    sc_.nonlinearity.lambda_into(w_, lam_);
    sc_.nonlinearity.a_into(w_, a_);
    try {
      diffusive_flux_from_lambda(grid_, lam_, dflux_);
    } catch (const flux_error&) {
      return {false, true, iters, "non-finite Lambda in Newton iteration"};
    }
    aflux_[0] = 0.0;
    aflux_[n] = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
      const double g = (rate_[j] - rate_[j - 1]) * invdx;
      const double uval = upwind ? ((g > 0.0) ? w_[j - 1] : w_[j]) : 0.5 * (w_[j - 1] + w_[j]);
      aflux_[j] = g * uval;
    }
    discrete_laplacian(grid_, rate_, rate2_);  // Lap wv

    double gnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double divnet = ((dflux_[i + 1] - aflux_[i + 1]) - (dflux_[i] - aflux_[i])) * invdx;
      const double gu = w_[i] - dt * divnet - state.u[i] - dt * su_[i];
      double gv;
      if (pe) {
        gv = rate_[i] - rate2_[i] - w_[i];
      } else {
        gv = rate_[i] - dt * (rate2_[i] - rate_[i] + w_[i]) - state.v[i] - dt * sv_[i];
      }
      bR_[2 * i] = -gu;
      bR_[2 * i + 1] = -gv;
      gnorm = std::max({gnorm, std::abs(gu), std::abs(gv)});
    }
    if (gnorm <= control_.newton_tol * scale) {
      converged = true;
      break;
    }

    // assemble 2x2 block rows
    for (std::size_t i = 0; i < n; ++i) {
      const bool left = (i == 0), right = (i + 1 == n);
      const double cnt = (left || right) ? 1.0 : 2.0;
      // interface data (zero at boundaries)
      double gl = 0.0, gr = 0.0, upl = 0.0, upr = 0.0, wll = 0.0, wlr = 0.0, wrl = 0.0, wrr = 0.0;
      if (!left) {
        gl = (rate_[i] - rate_[i - 1]) * invdx;
        upl = upwind ? ((gl > 0.0) ? w_[i - 1] : w_[i]) : 0.5 * (w_[i - 1] + w_[i]);
        wll = upwind ? ((gl > 0.0) ? 1.0 : 0.0) : 0.5;  // d aflux_i / d u_{i-1}  (per g)
        wlr = upwind ? ((gl > 0.0) ? 0.0 : 1.0) : 0.5;  // d aflux_i / d u_i
      }
      if (!right) {
        gr = (rate_[i + 1] - rate_[i]) * invdx;
        upr = upwind ? ((gr > 0.0) ? w_[i] : w_[i + 1]) : 0.5 * (w_[i] + w_[i + 1]);
        wrl = upwind ? ((gr > 0.0) ? 1.0 : 0.0) : 0.5;  // d aflux_{i+1} / d u_i
        wrr = upwind ? ((gr > 0.0) ? 0.0 : 1.0) : 0.5;  // d aflux_{i+1} / d u_{i+1}
      }
      double* B = &bB_[4 * i];
      double* A = &bA_[4 * i];
      double* C = &bC_[4 * i];
      // G_u row: u couplings
      B[0] = 1.0 + dt * cnt * a_[i] / dx2 + dt * (gr * wrl - gl * wlr) * invdx;
      A[0] = left ? 0.0 : (-dt * a_[i - 1] / dx2 - dt * gl * wll * invdx);
      C[0] = right ? 0.0 : (-dt * a_[i + 1] / dx2 + dt * gr * wrr * invdx);
      // G_u row: v couplings
      B[1] = -dt * (upl + upr) / dx2;
      A[1] = left ? 0.0 : dt * upl / dx2;
      C[1] = right ? 0.0 : dt * upr / dx2;
      // G_v row
      if (pe) {
        B[2] = -1.0;
        B[3] = 1.0 + cnt / dx2;
        A[2] = 0.0;
        A[3] = left ? 0.0 : -1.0 / dx2;
        C[2] = 0.0;
        C[3] = right ? 0.0 : -1.0 / dx2;
      } else {
        B[2] = -dt;
        B[3] = 1.0 + dt + dt * cnt / dx2;
        A[2] = 0.0;
        A[3] = left ? 0.0 : -dt / dx2;
        C[2] = 0.0;
        C[3] = right ? 0.0 : -dt / dx2;
      }
    }
    if (!block_.solve(bA_, bB_, bC_, bR_, bX_))
      return {false, true, iters, "singular Newton system"};
    double theta = 1.0;
    bool ok = false;
    for (int ls = 0; ls < 7; ++ls) {
      double mn = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) mn = std::min(mn, w_[i] + theta * bX_[2 * i]);
      if (mn > 0.0) {
        ok = true;
        break;
      }
      theta *= 0.5;
    }
    if (!ok) return {false, true, iters, "Newton iterate left the positive cone"};
    for (std::size_t i = 0; i < n; ++i) {
      w_[i] += theta * bX_[2 * i];
      rate_[i] += theta * bX_[2 * i + 1];
    }
  }
  if (!converged) return {false, true, iters, "Newton did not converge"};

  // conservative re-application with the converged coefficients
  sc_.nonlinearity.lambda_into(w_, lam_);
  diffusive_flux_from_lambda(grid_, lam_, dflux_);
  aflux_[0] = 0.0;
  aflux_[n] = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double g = (rate_[j] - rate_[j - 1]) * invdx;
    const double uval = upwind ? ((g > 0.0) ? w_[j - 1] : w_[j]) : 0.5 * (w_[j - 1] + w_[j]);
    aflux_[j] = g * uval;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double divnet = ((dflux_[i + 1] - aflux_[i + 1]) - (dflux_[i] - aflux_[i])) * invdx;
    next.u[i] = state.u[i] + dt * (divnet + su_[i]);
  }
  if (!all_finite(next.u)) return {false, false, iters, "non-finite state"};
  if (!positivity_ok(next.u)) return {false, true, iters, "positivity violated"};

  if (pe) {
    helmholtz_.solve(next.u, next.v);
  } else {
    // increment-form backward Euler for v, as in the IMEX path
    discrete_laplacian(grid_, state.v, rate2_);
    for (std::size_t i = 0; i < n; ++i) {
      const bool left = (i == 0), right = (i + 1 == n);
      const double cnt = (left || right) ? 1.0 : 2.0;
      sub_[i] = left ? 0.0 : -dt / dx2;
      sup_[i] = right ? 0.0 : -dt / dx2;
      diag_[i] = 1.0 + dt + dt * cnt / dx2;
      g_[i] = dt * (rate2_[i] - state.v[i] + next.u[i] + sv_[i]);
    }
    thomas_.solve(sub_, diag_, sup_, g_, delta_);
    for (std::size_t i = 0; i < n; ++i) next.v[i] = state.v[i] + delta_[i];
  }
  next.t = state.t + dt;
  return {true, false, iters, ""};
}

}  // namespace ks1d
