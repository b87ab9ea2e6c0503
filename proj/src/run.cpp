#include "ks1d/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace ks1d {

namespace {

// Everything the monitors need from one state, computed in a single pass
// over the shared cache.
struct StateEval {
  StateCache cache;
  double m = 0.0, sup_u = 0.0, min_u = 0.0, sup_v = 0.0, min_v = 0.0;
  double L = 0.0, D = 0.0, rhs = 0.0, d1 = 0.0, d2 = 0.0;
  SecondEnergy fe;

  void compute(const Grid& grid, const State& s, const Nonlinearity& nl, Variant variant) {
    cache.compute(grid, s, nl);
    m = mass(grid, s);
    sup_u = *std::max_element(s.u.begin(), s.u.end());
    min_u = *std::min_element(s.u.begin(), s.u.end());
    sup_v = *std::max_element(s.v.begin(), s.v.end());
    min_v = *std::min_element(s.v.begin(), s.v.end());
    L = lyapunov_L(grid, s, nl);
    fe = functional_F(grid, s, nl, cache);
    D = dissipation_D(grid, s, nl, variant, cache);
    rhs = lemma_rhs(grid, s, nl, variant, cache);
    auto dd = lyapunov_dissipation(grid, s, nl, cache);
    d1 = dd.first;
    d2 = dd.second;
  }
};

}  // namespace

RunReport run(const Scenario& scenario, const RunOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  scenario.validate();

  RunReport report;
  report.scenario = scenario;
  PropertySummary& ps = report.properties;
  ps.physics_monitors = !(options.sources && options.sources->active());

  const Grid grid(scenario.cells);
  const Nonlinearity& nl = scenario.nonlinearity;
  const Variant variant = scenario.variant;
  TimeStepper stepper(grid, scenario);
  State state = scenario.initial_state(grid);
  const double m0 = mass(grid, state);
  ps.initial_mass = m0;

  StateEval eval_prev;
  eval_prev.compute(grid, state, nl, variant);

  WeightedDissipationAccumulator wacc;

  const double out_dt = scenario.effective_output_interval();
  const double t_end = scenario.t_end;

  auto emit_sample = [&](const State& s, const StateEval& ev, double id_res, double dt_used) {
    if (!report.samples.empty() && !(s.t > report.samples.back().t)) return;
    const InequalityMonitors iq = inequality_monitors(grid, s, nl, m0, ev.cache);
    const CrossTermCheck ct = cross_term_residual(grid, s, nl, variant, ev.cache);
    FunctionalSample row;
    row.t = s.t;
    row.mass = ev.m;
    row.sup_u = ev.sup_u;
    row.min_u = ev.min_u;
    row.sup_v = ev.sup_v;
    row.L_value = ev.L;
    row.F_value = ev.fe.F;
    row.D_value = ev.D;
    row.rhs_lemma = ev.rhs;
    row.identity_residual = id_res;
    row.cross_term_residual = ct.residual;
    row.lambda_L1 = iq.lambda_L1;
    row.lambda_L2_sq = iq.lambda_L2_sq;
    row.lambda_W11 = iq.lambda_W11;
    row.grad_term = ev.fe.grad_term;
    row.uLambda_term = ev.fe.uLambda_term;
    row.sobolev_slack = iq.sobolev_slack;
    row.dt_used = dt_used;
    report.samples.push_back(row);
    if (options.store_states) report.sampled_states.push_back(s);

    if (!ps.physics_monitors) return;
    const double ratio = ct.residual / ct.scale;
    if (ratio > ps.max_cross_residual_scaled) {
      ps.max_cross_residual_scaled = ratio;
      ps.t_worst_cross = s.t;
    }
    ps.min_sobolev_slack = std::min(ps.min_sobolev_slack, iq.sobolev_slack);
    ps.min_prop31_slack = std::min(ps.min_prop31_slack, iq.prop31_pointwise_slack);
    ps.sup_grad_term = std::max(ps.sup_grad_term, iq.grad_term);
    ps.sup_lambda_W11 = std::max(ps.sup_lambda_W11, iq.lambda_W11);
    ps.sup_abs_lambda = std::max(ps.sup_abs_lambda, iq.sup_abs_lambda);
    ps.sup_r31 = std::max(ps.sup_r31, iq.r31);
    ps.sup_r32 = std::max(ps.sup_r32, iq.r32);
    ps.min_r41 = std::min(ps.min_r41, iq.r41);
    // weighted dissipation integrand: grad term + sum ubar (dv/dx)^2 dx
    double adv = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double ubar = 0.5 * (s.u[i] + s.u[i + 1]);
      const double gv = (s.v[i + 1] - s.v[i]) / grid.dx;
      adv += ubar * gv * gv;
    }
    adv *= grid.dx;
    wacc.add(s.t, iq.grad_term + adv);
    ps.sup_weighted_dissipation = std::max(ps.sup_weighted_dissipation, wacc.supremum());
    double l1 = 0.0, l2 = 0.0;
    for (double vi : s.v) {
      l1 += std::abs(vi);
      l2 += vi * vi;
    }
    ps.sup_v_l1 = std::max(ps.sup_v_l1, l1 * grid.dx);
    ps.sup_v_l2 = std::max(ps.sup_v_l2, std::sqrt(l2 * grid.dx));
    ps.sup_v_linf = std::max(ps.sup_v_linf, ev.sup_v);
  };

  emit_sample(state, eval_prev, 0.0, 0.0);

  if (t_end <= 0.0) {
    report.status = {TerminationKind::Completed, 0.0, eval_prev.sup_u, ""};
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
  }

  double next_sample = std::min(out_dt, t_end);
  StepControl& ctl = stepper.control();
  State next;
  StateEval eval_next;
  int pos_newton_rejects_in_a_row = 0;
  const double t_eps = 1e-12 * std::max(1.0, t_end);

  while (state.t < t_end - t_eps) {
    double dt_try = ctl.dt;
    const double lim = stepper.cfl_limit(state) * ctl.cfl_safety;
    dt_try = std::min(dt_try, lim);
    bool event_capped = false;
    const double next_event = std::min(next_sample, t_end);
    if (state.t + dt_try >= next_event - t_eps) {
      dt_try = next_event - state.t;
      event_capped = true;
    }
    if (!(dt_try > 0.0) || (dt_try < scenario.dt_min && !event_capped)) {
      report.status = {TerminationKind::StepFailure, state.t, eval_prev.sup_u,
                       "stability limit drove the step below dt_min"};
      break;
    }

    const auto att = stepper.attempt(state, dt_try, next, options.sources);

    if (!att.accepted) {
      ++report.steps_rejected;
      ++ctl.rejected_in_a_row;
      ctl.accepted_streak = 0;
      pos_newton_rejects_in_a_row = att.positivity_or_newton ? pos_newton_rejects_in_a_row + 1 : 0;
      const double dt_base = std::min(ctl.dt, dt_try);
      if (dt_base <= scenario.dt_min * (1.0 + 1e-12)) {
        if (pos_newton_rejects_in_a_row >= 3) {
          report.status = {TerminationKind::BlowupSuspected, state.t, eval_prev.sup_u,
                           "dt collapsed to dt_min under repeated positivity/Newton failures: " +
                               att.reason};
        } else {
          report.status = {TerminationKind::StepFailure, state.t, eval_prev.sup_u,
                           "step rejected at dt_min: " + att.reason};
        }
        break;
      }
      ctl.dt = std::max(scenario.dt_min, 0.5 * dt_base);
      continue;
    }

    ++report.steps_accepted;
    ctl.rejected_in_a_row = 0;
    pos_newton_rejects_in_a_row = 0;
    if (++ctl.accepted_streak >= 5) {
      ctl.dt = std::min(scenario.dt_max, ctl.dt * 1.2);
      ctl.accepted_streak = 0;
    }

    eval_next.compute(grid, next, nl, variant);
    const double dt_used = next.t - state.t;

    // per-step identity residual across the accepted step
    double id_res;
    if (options.residual_mode == ResidualMode::Forward) {
      id_res = (eval_next.fe.F - eval_prev.fe.F) / dt_used + eval_prev.D - eval_prev.rhs;
    } else {
      id_res = identity_residual(grid, state, next, nl, variant, ResidualMode::Centered);
    }

    if (ps.physics_monitors) {
      const double step_drift = std::abs(eval_next.m - eval_prev.m) / m0;
      if (step_drift > ps.max_step_mass_drift) {
        ps.max_step_mass_drift = step_drift;
        ps.t_worst_mass = next.t;
      }
      ps.max_total_mass_drift = std::max(ps.max_total_mass_drift, std::abs(eval_next.m - m0) / m0);
      if (eval_next.min_u < ps.min_u) {
        ps.min_u = eval_next.min_u;
        ps.t_min_u = next.t;
      }
      ps.min_v = std::min(ps.min_v, eval_next.min_v);
      const double dL = eval_next.L - eval_prev.L;
      const double viol = dL - 10.0 * dt_used * (eval_prev.d1 + eval_prev.d2);
      if (viol > ps.max_L_violation) {
        ps.max_L_violation = viol;
        ps.t_worst_L = next.t;
      }
      ps.max_L_increase = std::max(ps.max_L_increase, std::max(0.0, dL));
      if (std::abs(id_res) > ps.max_identity_residual) {
        ps.max_identity_residual = std::abs(id_res);
        ps.t_worst_identity = next.t;
      }
      ps.sup_F = std::max(ps.sup_F, eval_next.fe.F);
      if (next.t >= scenario.t0_monitor) ps.sup_F_after_t0 = std::max(ps.sup_F_after_t0, eval_next.fe.F);
      ps.sup_u_over_run = std::max(ps.sup_u_over_run, eval_next.sup_u);
    }

    if (options.dense) {
      StepRecord rec;
      rec.t = next.t;
      rec.dt = dt_used;
      rec.identity_residual = id_res;
      rec.cross_term_residual =
          cross_term_residual(grid, next, nl, variant, eval_next.cache).residual;
      rec.mass_drift_rel = std::abs(eval_next.m - eval_prev.m) / m0;
      rec.L_increase = std::max(0.0, eval_next.L - eval_prev.L);
      rec.d1 = eval_prev.d1;
      rec.d2 = eval_prev.d2;
      report.step_records.push_back(rec);
    }

    std::swap(state, next);
    std::swap(eval_prev, eval_next);

    if (eval_prev.sup_u >= scenario.blowup_threshold) {
      emit_sample(state, eval_prev, id_res, dt_used);
      report.status = {TerminationKind::BlowupSuspected, state.t, eval_prev.sup_u,
                       "density crossed the blow-up threshold"};
      break;
    }

    if (std::abs(state.t - next_sample) <= t_eps || state.t > next_sample) {
      emit_sample(state, eval_prev, id_res, dt_used);
      while (next_sample <= state.t + t_eps) next_sample += out_dt;
    }

    if (state.t >= t_end - t_eps) {
      emit_sample(state, eval_prev, id_res, dt_used);
      report.status = {TerminationKind::Completed, state.t, eval_prev.sup_u, ""};
      break;
    }
  }

  if (state.t >= t_end - t_eps && report.status.kind == TerminationKind::Completed &&
      report.status.t_stop == 0.0) {
    report.status = {TerminationKind::Completed, state.t, eval_prev.sup_u, ""};
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

}  // namespace ks1d
