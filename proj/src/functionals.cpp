#include "ks1d/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ks1d/spatial.hpp"

namespace ks1d {

namespace {
constexpr double kFourOverESq = 4.0 / (2.718281828459045 * 2.718281828459045);
}

void StateCache::compute(const Grid& grid, const State& s, const Nonlinearity& nl) {
  const std::size_t n = grid.size();
  lambda_u.resize(n);
  a_u.resize(n);
  lap_v.resize(n);
  rhs_v.resize(n);
  nl.lambda_into(s.u, lambda_u);
  nl.a_into(s.u, a_u);
  discrete_laplacian(grid, s.v, lap_v);
  for (std::size_t i = 0; i < n; ++i) rhs_v[i] = lap_v[i] - s.v[i] + s.u[i];
}

double mass(const Grid& grid, const State& s) {
  double m = 0.0;
  for (double ui : s.u) m += ui;
  return m * grid.dx;
}

double lyapunov_L(const Grid& grid, const State& s, const Nonlinearity& nl) {
  const std::size_t n = grid.size();
  double sum_b = 0.0, sum_uv = 0.0, sum_v2 = 0.0, sum_gv2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_b += nl.b(s.u[i]);
    sum_uv += s.u[i] * s.v[i];
    sum_v2 += s.v[i] * s.v[i];
    if (i + 1 < n) {
      const double g = (s.v[i + 1] - s.v[i]) / grid.dx;
      sum_gv2 += g * g;
    }
  }
  return (sum_b - sum_uv + 0.5 * (sum_v2 + sum_gv2)) * grid.dx;
}

std::pair<double, double> lyapunov_dissipation(const Grid& grid, const State& s,
                                               const Nonlinearity& nl) {
  StateCache c;
  c.compute(grid, s, nl);
  return lyapunov_dissipation(grid, s, nl, c);
}

std::pair<double, double> lyapunov_dissipation(const Grid& grid, const State& s,
                                               const Nonlinearity& /*nl*/, const StateCache& c) {
  const std::size_t n = grid.size();
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) d1 += c.rhs_v[i] * c.rhs_v[i];
  d1 *= grid.dx;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double ubar = 0.5 * (s.u[i] + s.u[i + 1]);
    const double glam = (c.lambda_u[i + 1] - c.lambda_u[i]) / grid.dx;
    const double gv = (s.v[i + 1] - s.v[i]) / grid.dx;
    const double w = glam / ubar - gv;
    d2 += ubar * w * w;
  }
  d2 *= grid.dx;
  return {d1, d2};
}

SecondEnergy functional_F(const Grid& grid, const State& s, const Nonlinearity& nl) {
  StateCache c;
  c.compute(grid, s, nl);
  return functional_F(grid, s, nl, c);
}

SecondEnergy functional_F(const Grid& grid, const State& s, const Nonlinearity& /*nl*/,
                          const StateCache& c) {
  const std::size_t n = grid.size();
  SecondEnergy out;
  double grad = 0.0, ul = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double ubar = 0.5 * (s.u[i] + s.u[i + 1]);
    const double glam = (c.lambda_u[i + 1] - c.lambda_u[i]) / grid.dx;
    grad += glam * glam / ubar;
  }
  for (std::size_t i = 0; i < n; ++i) ul += s.u[i] * c.lambda_u[i];
  out.grad_term = grad * grid.dx;
  out.uLambda_term = ul * grid.dx;
  out.F = 0.5 * out.grad_term - out.uLambda_term;
  return out;
}

double dissipation_D(const Grid& grid, const State& s, const Nonlinearity& nl, Variant variant) {
  StateCache c;
  c.compute(grid, s, nl);
  return dissipation_D(grid, s, nl, variant, c);
}

double dissipation_D(const Grid& grid, const State& s, const Nonlinearity& /*nl*/, Variant variant,
                     const StateCache& c) {
  const std::size_t n = grid.size();
  // interface values of (a(u)/u) u_x realized as (dLambda/dx)/ubar, zero at
  // the boundary, then a conservative difference per cell
  double q_prev = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double q_next = 0.0;
    if (i + 1 < n) {
      const double ubar = 0.5 * (s.u[i] + s.u[i + 1]);
      q_next = (c.lambda_u[i + 1] - c.lambda_u[i]) / grid.dx / ubar;
    }
    const double div_q = (q_next - q_prev) / grid.dx;
    q_prev = q_next;
    const double carrier = (variant == Variant::ParabolicParabolic)
                               ? 0.5 * (s.v[i] + c.rhs_v[i])
                               : 0.5 * s.v[i];
    const double w = div_q - c.lap_v[i] + carrier;
    total += s.u[i] * c.a_u[i] * w * w;
  }
  return total * grid.dx;
}

double lemma_rhs(const Grid& grid, const State& s, const Nonlinearity& nl, Variant variant) {
  StateCache c;
  c.compute(grid, s, nl);
  return lemma_rhs(grid, s, nl, variant, c);
}

double lemma_rhs(const Grid& grid, const State& s, const Nonlinearity& /*nl*/, Variant variant,
                 const StateCache& c) {
  const std::size_t n = grid.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double carrier =
        (variant == Variant::ParabolicParabolic) ? (s.v[i] + c.rhs_v[i]) : s.v[i];
    total += c.a_u[i] * s.u[i] * carrier * carrier * 0.25;
  }
  return total * grid.dx;
}

double identity_residual(const Grid& grid, const State& prev, const State& next,
                         const Nonlinearity& nl, Variant variant, ResidualMode mode) {
  if (prev.u.size() != next.u.size() || prev.u.size() != grid.size())
    throw std::invalid_argument("identity_residual: mismatched grids");
  const double dt = next.t - prev.t;
  if (!(dt > 0.0)) throw std::invalid_argument("identity_residual: states must be dt apart");
  const double f_prev = functional_F(grid, prev, nl).F;
  const double f_next = functional_F(grid, next, nl).F;
  double d_mid, rhs_mid;
  if (mode == ResidualMode::Forward) {
    StateCache c;
    c.compute(grid, prev, nl);
    d_mid = dissipation_D(grid, prev, nl, variant, c);
    rhs_mid = lemma_rhs(grid, prev, nl, variant, c);
  } else {
    State mid(prev);
    mid.t = 0.5 * (prev.t + next.t);
    for (std::size_t i = 0; i < mid.u.size(); ++i) {
      mid.u[i] = 0.5 * (prev.u[i] + next.u[i]);
      mid.v[i] = 0.5 * (prev.v[i] + next.v[i]);
    }
    StateCache c;
    c.compute(grid, mid, nl);
    d_mid = dissipation_D(grid, mid, nl, variant, c);
    rhs_mid = lemma_rhs(grid, mid, nl, variant, c);
  }
  return (f_next - f_prev) / dt + d_mid - rhs_mid;
}

CrossTermCheck cross_term_residual(const Grid& grid, const State& s, const Nonlinearity& nl,
                                   Variant variant) {
  StateCache c;
  c.compute(grid, s, nl);
  return cross_term_residual(grid, s, nl, variant, c);
}

CrossTermCheck cross_term_residual(const Grid& grid, const State& s, const Nonlinearity& /*nl*/,
                                   Variant variant, const StateCache& c) {
  const std::size_t n = grid.size();
  double grad_side = 0.0, grad_abs = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double glam = (c.lambda_u[i + 1] - c.lambda_u[i]) / grid.dx;
    const double gv = (s.v[i + 1] - s.v[i]) / grid.dx;
    grad_side += glam * gv;
    grad_abs += std::abs(glam * gv);
  }
  grad_side *= grid.dx;
  grad_abs *= grid.dx;
  double pot_side = 0.0, pot_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (variant == Variant::ParabolicParabolic)
                         ? (c.rhs_v[i] + s.v[i] - s.u[i])
                         : (s.v[i] - s.u[i]);
    pot_side += c.lambda_u[i] * w;
    pot_abs += std::abs(c.lambda_u[i] * w);
  }
  pot_side *= grid.dx;
  pot_abs *= grid.dx;
  CrossTermCheck out;
  out.residual = std::abs(grad_side + pot_side);
  out.scale = 1.0 + grad_abs + pot_abs;
  return out;
}

InequalityMonitors inequality_monitors(const Grid& grid, const State& s, const Nonlinearity& nl,
                                       double M) {
  StateCache c;
  c.compute(grid, s, nl);
  return inequality_monitors(grid, s, nl, M, c);
}

InequalityMonitors inequality_monitors(const Grid& grid, const State& s, const Nonlinearity& nl,
                                       double M, const StateCache& c) {
  const std::size_t n = grid.size();
  InequalityMonitors out;

  long double l1 = 0.0L, l2 = 0.0L, tv = 0.0L;
  double sup_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double al = std::abs(c.lambda_u[i]);
    l1 += al;
    l2 += static_cast<long double>(c.lambda_u[i]) * c.lambda_u[i];
    sup_abs = std::max(sup_abs, al);
    if (i + 1 < n) tv += std::abs(c.lambda_u[i + 1] - c.lambda_u[i]);
  }
  out.lambda_L1 = static_cast<double>(l1) * grid.dx;
  out.lambda_L2_sq = static_cast<double>(l2) * grid.dx;
  out.lambda_W11 = out.lambda_L1 + static_cast<double>(tv);
  out.sup_abs_lambda = sup_abs;

  // max |Lambda_i| <= mean |Lambda| + total variation, term by term so the
  // slack stays nonnegative in floating point as well
  long double deficit = 0.0L;
  for (std::size_t i = 0; i < n; ++i) deficit += sup_abs - std::abs(c.lambda_u[i]);
  out.sobolev_slack = static_cast<double>(tv - deficit * grid.dx);

  const SecondEnergy fe = functional_F(grid, s, nl, c);
  out.grad_term = fe.grad_term;
  out.uLambda_term = fe.uLambda_term;
  out.F_value = fe.F;

  out.r31 = out.lambda_L2_sq / (M + 1.0);
  out.r32 = fe.uLambda_term - std::pow(M, 1.5) * std::sqrt(fe.grad_term);
  out.r41 = fe.F - 0.25 * fe.grad_term;

  const double alpha = nl.alpha_exact().value_or(nl.alpha_estimate());
  const double lam_max_sq = nl.lambda_sup_sq_unit();
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double slack =
        lam_max_sq + kFourOverESq * alpha * alpha * s.u[i] - c.lambda_u[i] * c.lambda_u[i];
    worst = std::min(worst, slack);
  }
  out.prop31_pointwise_slack = worst;
  return out;
}

void WeightedDissipationAccumulator::add(double t, double integrand) {
  if (!(integrand >= 0.0))
    throw std::invalid_argument("weighted accumulator: integrand must be nonnegative");
  if (!started_) {
    started_ = true;
    t_prev_ = t;
    g_prev_ = integrand;
    value_ = 0.0;
    sup_ = 0.0;
    return;
  }
  if (!(t > t_prev_)) throw std::invalid_argument("weighted accumulator: times must increase");
  const double dt = t - t_prev_;
  const double decay = std::exp(-dt);
  value_ = value_ * decay + 0.5 * dt * (decay * g_prev_ + integrand);
  sup_ = std::max(sup_, value_);
  t_prev_ = t;
  g_prev_ = integrand;
}

double weighted_dissipation_integrand(const Grid& grid, const State& s, const Nonlinearity& nl) {
  StateCache c;
  c.compute(grid, s, nl);
  const std::size_t n = grid.size();
  double adv = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double ubar = 0.5 * (s.u[i] + s.u[i + 1]);
    const double gv = (s.v[i + 1] - s.v[i]) / grid.dx;
    adv += ubar * gv * gv;
  }
  adv *= grid.dx;
  return functional_F(grid, s, nl, c).grad_term + adv;
}

}  // namespace ks1d
