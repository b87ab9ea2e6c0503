#include "ks1d/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ks1d/scenario.hpp"

namespace ks1d {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

void write_samples_csv(const std::string& path, const std::vector<FunctionalSample>& samples) {
  auto out = open_or_throw(path);
  out << kSampleCsvHeader << "\n";
  for (const auto& s : samples) {
    out << format_double(s.t) << ',' << format_double(s.mass) << ',' << format_double(s.sup_u)
        << ',' << format_double(s.min_u) << ',' << format_double(s.sup_v) << ','
        << format_double(s.L_value) << ',' << format_double(s.F_value) << ','
        << format_double(s.D_value) << ',' << format_double(s.rhs_lemma) << ','
        << format_double(s.identity_residual) << ',' << format_double(s.cross_term_residual)
        << ',' << format_double(s.lambda_L1) << ',' << format_double(s.lambda_L2_sq) << ','
        << format_double(s.lambda_W11) << ',' << format_double(s.grad_term) << ','
        << format_double(s.uLambda_term) << ',' << format_double(s.sobolev_slack) << ','
        << format_double(s.dt_used) << "\n";
  }
}

void write_residuals_csv(const std::string& path, const std::vector<StepRecord>& records) {
  auto out = open_or_throw(path);
  out << "t,dt,identity_residual,cross_term_residual,mass_drift_rel,L_increase,d1,d2\n";
  for (const auto& r : records) {
    out << format_double(r.t) << ',' << format_double(r.dt) << ','
        << format_double(r.identity_residual) << ',' << format_double(r.cross_term_residual)
        << ',' << format_double(r.mass_drift_rel) << ',' << format_double(r.L_increase) << ','
        << format_double(r.d1) << ',' << format_double(r.d2) << "\n";
  }
}

std::string termination_name(TerminationKind k) {
  switch (k) {
    case TerminationKind::Completed: return "completed";
    case TerminationKind::BlowupSuspected: return "blowup_suspected";
    case TerminationKind::StepFailure: return "step_failure";
  }
  return "?";
}

void write_phase_csv(const std::string& path, const std::vector<PhaseRow>& rows) {
  auto out = open_or_throw(path);
  out << "p,M,status,sup_u_final,t_stop\n";
  for (const auto& r : rows) {
    out << format_double(r.p) << ',' << format_double(r.mass) << ',' << termination_name(r.status)
        << ',' << format_double(r.sup_u_final) << ',' << format_double(r.t_stop) << "\n";
  }
}

std::string render_report(const RunReport& report) {
  const PropertySummary& ps = report.properties;
  std::ostringstream os;
  os << "== run report ==\n";
  os << "status: " << termination_name(report.status.kind);
  if (report.status.kind != TerminationKind::Completed) {
    os << " (t_stop=" << format_double(report.status.t_stop)
       << ", sup_u=" << format_double(report.status.sup_u) << ")\n  reason: " << report.status.reason
       << "\n";
  } else {
    os << " (t=" << format_double(report.status.t_stop) << ")\n";
  }
  os << "steps: " << report.steps_accepted << " accepted, " << report.steps_rejected
     << " rejected\n";
  os << "samples: " << report.samples.size() << "\n";
  os << "wall seconds: " << report.wall_seconds << "\n\n";

  os << "scenario:\n" << scenario_to_json(report.scenario) << "\n\n";

  if (!ps.physics_monitors) {
    os << "structural monitors disabled (manufactured sources were active)\n";
    return os.str();
  }

  auto verdict = [](bool held) { return held ? "held      " : "VIOLATED  "; };
  os << "structural monitors (worst case over the run):\n";
  os << "  " << verdict(ps.max_step_mass_drift <= 1e-10) << "mass conservation        max per-step drift "
     << format_double(ps.max_step_mass_drift) << " (at t=" << format_double(ps.t_worst_mass)
     << "), cumulative " << format_double(ps.max_total_mass_drift) << "\n";
  os << "  " << verdict(ps.min_u >= report.scenario.positivity_floor) << "positivity               min u "
     << format_double(ps.min_u) << " (at t=" << format_double(ps.t_min_u) << "), floor "
     << format_double(report.scenario.positivity_floor) << "\n";
  os << "  " << verdict(ps.max_L_violation <= 0.0) << "free-energy decay        max[dL - 10 dt (d1+d2)] "
     << format_double(ps.max_L_violation) << " (at t=" << format_double(ps.t_worst_L)
     << "), max raw increase " << format_double(ps.max_L_increase) << "\n";
  os << "  " << verdict(ps.max_cross_residual_scaled <= 1e-10)
     << "cross-term identity      max residual/scale " << format_double(ps.max_cross_residual_scaled)
     << " (at t=" << format_double(ps.t_worst_cross) << ")\n";
  os << "  " << verdict(ps.min_sobolev_slack >= 0.0) << "discrete Sobolev slack   min "
     << format_double(ps.min_sobolev_slack) << "\n";
  os << "  " << verdict(ps.min_prop31_slack >= 0.0) << "pointwise Lambda bound   min slack "
     << format_double(ps.min_prop31_slack) << "\n";
  os << "  (info)     energy-identity residual  max " << format_double(ps.max_identity_residual)
     << " (at t=" << format_double(ps.t_worst_identity) << ")\n\n";

  os << "empirical constants (running extrema):\n";
  os << "  sup F (all t)              " << format_double(ps.sup_F) << "\n";
  os << "  sup F (t >= t0_monitor)    " << format_double(ps.sup_F_after_t0) << "\n";
  os << "  sup_u over run             " << format_double(ps.sup_u_over_run) << "\n";
  os << "  sup grad term              " << format_double(ps.sup_grad_term) << "\n";
  os << "  sup |Lambda(u)| (L-inf)    " << format_double(ps.sup_abs_lambda) << "\n";
  os << "  sup ||Lambda(u)||_W11      " << format_double(ps.sup_lambda_W11) << "\n";
  os << "  sup ratio |Lambda|^2_L2/(M+1)   " << format_double(ps.sup_r31) << "\n";
  os << "  sup [uLambda - M^1.5 sqrt(grad)] " << format_double(ps.sup_r32) << "\n";
  os << "  inf [F - grad/4]           " << format_double(ps.min_r41) << "\n";
  os << "  sup weighted dissipation   " << format_double(ps.sup_weighted_dissipation) << "\n";
  os << "  sup ||v||_L1 / L2 / Linf   " << format_double(ps.sup_v_l1) << " / "
     << format_double(ps.sup_v_l2) << " / " << format_double(ps.sup_v_linf) << "\n";
  return os.str();
}

void write_plot_script(const std::string& path) {
  auto out = open_or_throw(path);
  out << R"(#!/usr/bin/env python3
"""Plots t vs {sup_u, L, F, identity_residual} from samples.csv."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
src = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "samples.csv")

cols = {}
with open(src) as fh:
    reader = csv.DictReader(fh)
    for row in reader:
        for key, val in row.items():
            cols.setdefault(key, []).append(float(val))

fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
panels = [("sup_u", "sup u"), ("L", "free energy L"), ("F", "second energy F"),
          ("identity_residual", "identity residual")]
for ax, (key, title) in zip(axes.flat, panels):
    ax.plot(cols["t"], cols[key], lw=1.2)
    ax.set_title(title)
    ax.set_xlabel("t")
    ax.grid(alpha=0.3)
fig.tight_layout()
dest = os.path.join(os.path.dirname(src), "trajectories.png")
fig.savefig(dest, dpi=130)
print("wrote", dest)
)";
}

}  // namespace ks1d
