#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ks1d/grid.hpp"
#include "ks1d/nonlinearity.hpp"
#include "ks1d/spatial.hpp"
#include "ks1d/types.hpp"

namespace ks1d {

enum class InitialProfile { Constant, Cosine, Gaussian };

// Analytic initial profile with zero derivative at both endpoints.
//   constant: mass
//   cosine:   mass * (1 + amplitude * cos(2 pi x)),   |amplitude| <= 1
//   gaussian: mass-normalized exp(-amplitude * cos^2(pi x)) bump centered at 1/2
struct ProfileSpec {
  InitialProfile profile = InitialProfile::Constant;
  double mass = 1.0;
  double amplitude = 1.0;

  double value_at(double x) const;
  double derivative_at(double x) const;
};

struct Scenario {
  Variant variant = Variant::ParabolicParabolic;
  Nonlinearity nonlinearity = Nonlinearity::power(1.0);
  ProfileSpec initial_u;
  ProfileSpec initial_v;  // ignored by the parabolic-elliptic variant
  int cells = 64;
  double dt_initial = 1e-4;
  double dt_min = 1e-12;
  double dt_max = 1e-2;
  double t_end = 1.0;
  double t0_monitor = 0.1;  // F-boundedness monitoring starts here
  double blowup_threshold = 1e6;
  double positivity_floor = 1e-13;
  StepperKind stepper = StepperKind::IMEX1;
  AdvectionScheme advection_scheme = AdvectionScheme::Upwind;
  double output_interval = 0.0;  // 0 = max(t_end/500, 10*dt_initial)

  // Throws std::invalid_argument with the offending field named.
  void validate() const;

  double effective_output_interval() const;

  // Evaluates the profiles at cell centers; the parabolic-elliptic variant
  // replaces v by the quasi-static solve. Throws if the discrete initial
  // density falls below the positivity floor.
  State initial_state(const Grid& grid) const;
};

struct SweepGrid {
  std::vector<double> p;
  std::vector<double> mass;
};

struct Config {
  Scenario scenario;
  std::optional<SweepGrid> sweep;
};

// Strict parsing: unknown keys anywhere in the document are rejected.
// Parse errors carry file:line:column; semantic errors name the key.
Config parse_config(const std::string& json_text, const std::string& origin = "<config>");
Config load_config(const std::string& path);

// Round-trips the scenario for the run report.
std::string scenario_to_json(const Scenario& sc);

}  // namespace ks1d
