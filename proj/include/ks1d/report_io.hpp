#pragma once

// File emission for runs and sweeps: samples.csv / residuals.csv / phase.csv
// with fixed headers, a human-readable report, and a generated plot script.
// Numbers are printed with %.17g so identical runs byte-reproduce.

#include <string>
#include <vector>

#include "ks1d/run.hpp"

namespace ks1d {

std::string format_double(double x);

void write_samples_csv(const std::string& path, const std::vector<FunctionalSample>& samples);
void write_residuals_csv(const std::string& path, const std::vector<StepRecord>& records);

struct PhaseRow {
  double p = 0.0;
  double mass = 0.0;
  TerminationKind status = TerminationKind::Completed;
  double sup_u_final = 0.0;
  double t_stop = 0.0;
};
void write_phase_csv(const std::string& path, const std::vector<PhaseRow>& rows);

std::string termination_name(TerminationKind k);

// Property verdict table plus empirical constants, suitable for report.txt.
std::string render_report(const RunReport& report);

// Emits a python script that plots t vs {sup_u, L, F, identity_residual}
// from samples.csv next to it.
void write_plot_script(const std::string& path);

}  // namespace ks1d
