#pragma once

// Drives a scenario from t = 0 to t_end (or termination), tracking the
// structural monitors every accepted step and emitting FunctionalSamples at
// a fixed output cadence. Steps land exactly on cadence times so runs at
// different resolutions share their sample timestamps.

#include <limits>
#include <string>
#include <vector>

#include "ks1d/functionals.hpp"
#include "ks1d/scenario.hpp"
#include "ks1d/timestep.hpp"

namespace ks1d {

struct StepRecord {
  double t = 0.0;
  double dt = 0.0;
  double identity_residual = 0.0;
  double cross_term_residual = 0.0;
  double mass_drift_rel = 0.0;
  double L_increase = 0.0;  // max(0, L_next - L_prev)
  double d1 = 0.0, d2 = 0.0;
};

// Worst-case slacks over a run, with the time they occurred.
struct PropertySummary {
  bool physics_monitors = true;  // false when manufactured sources are active
  double initial_mass = 0.0;

  double max_step_mass_drift = 0.0;  // |m_next - m_prev| / m_0 per step
  double t_worst_mass = 0.0;
  double max_total_mass_drift = 0.0;  // |m(t) - m_0| / m_0

  double min_u = std::numeric_limits<double>::infinity();
  double t_min_u = 0.0;
  double min_v = std::numeric_limits<double>::infinity();

  double max_L_violation = -std::numeric_limits<double>::infinity();  // dL - 10 dt (d1+d2)
  double t_worst_L = 0.0;
  double max_L_increase = 0.0;  // max(0, dL) per step

  double max_identity_residual = 0.0;
  double t_worst_identity = 0.0;
  double max_cross_residual_scaled = 0.0;  // residual / scale, per sample
  double t_worst_cross = 0.0;

  double min_sobolev_slack = std::numeric_limits<double>::infinity();
  double min_prop31_slack = std::numeric_limits<double>::infinity();

  double sup_F = -std::numeric_limits<double>::infinity();
  double sup_F_after_t0 = -std::numeric_limits<double>::infinity();
  double sup_u_over_run = 0.0;
  double sup_grad_term = 0.0;
  double sup_lambda_W11 = 0.0;
  double sup_abs_lambda = 0.0;
  double sup_r31 = 0.0;
  double sup_r32 = -std::numeric_limits<double>::infinity();
  double min_r41 = std::numeric_limits<double>::infinity();
  double sup_weighted_dissipation = 0.0;

  double sup_v_l1 = 0.0, sup_v_l2 = 0.0, sup_v_linf = 0.0;
};

struct RunOptions {
  const SourceHook* sources = nullptr;
  bool dense = false;         // keep per-step residual records
  bool store_states = false;  // keep a copy of the state at each sample
  ResidualMode residual_mode = ResidualMode::Forward;
};

struct RunReport {
  Scenario scenario;
  std::vector<FunctionalSample> samples;
  TerminationStatus status;
  PropertySummary properties;
  std::vector<StepRecord> step_records;
  std::vector<State> sampled_states;
  double wall_seconds = 0.0;
  long steps_accepted = 0;
  long steps_rejected = 0;
};

RunReport run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace ks1d
