#pragma once

// Time integration of the coupled system. Three steppers:
//   ExplicitRK     Heun's method on (u, v) jointly, CFL-limited
//   IMEX1          backward-Euler Lambda-diffusion (tridiagonal Newton),
//                  explicit advection, implicit linear v-solve
//   FullyImplicit  backward Euler on the full coupled system, 2x2-block Newton
// The accepted density update is always re-assembled in conservative flux
// form from the converged coefficients, so a step conserves mass to roundoff
// independently of the Newton tolerance. Positivity is enforced by step
// rejection, never by clamping.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ks1d/functionals.hpp"
#include "ks1d/grid.hpp"
#include "ks1d/scenario.hpp"
#include "ks1d/spatial.hpp"
#include "ks1d/tridiag.hpp"
#include "ks1d/types.hpp"

namespace ks1d {

struct StepControl {
  double dt = 0.0;
  int rejected_in_a_row = 0;
  int accepted_streak = 0;
  double cfl_safety = 0.5;
  double newton_tol = 1e-10;
  int newton_max_iter = 30;
};

enum class TerminationKind { Completed, BlowupSuspected, StepFailure };

struct TerminationStatus {
  TerminationKind kind = TerminationKind::Completed;
  double t_stop = 0.0;
  double sup_u = 0.0;
  std::string reason;
};

// Optional manufactured source terms, added as explicit cell rates.
struct SourceHook {
  std::function<double(double t, double x)> s_u;
  std::function<double(double t, double x)> s_v;
  bool active() const { return static_cast<bool>(s_u); }
};

// rate = div( a(u) u_x - u v_x ) per cell.
void rhs_u(const Grid& grid, const State& s, const Nonlinearity& nl, AdvectionScheme scheme,
           std::span<double> out);

// rate = Lap_h v - v + u per cell; this exact vector is what the functionals
// module uses as the semi-discrete time derivative of v.
void rhs_v(const Grid& grid, const State& s, std::span<double> out);

class TimeStepper {
 public:
  TimeStepper(const Grid& grid, const Scenario& scenario);

  struct Attempt {
    bool accepted = false;
    bool positivity_or_newton = false;  // classifies rejections
    int newton_iters = 0;
    std::string reason;
  };

  // Tries to advance `state` by dt into `next` (t advances too). The input
  // state is never modified; a rejection leaves `next` unspecified.
  Attempt attempt(const State& state, double dt, State& next, const SourceHook* src = nullptr);

  // Stability limits used by the controller. Infinite when inapplicable.
  double cfl_limit(const State& state) const;

  const Grid& grid() const { return grid_; }
  const Scenario& scenario() const { return sc_; }
  StepControl& control() { return control_; }

 private:
  Attempt heun(const State& state, double dt, State& next, const SourceHook* src);
  Attempt imex1(const State& state, double dt, State& next, const SourceHook* src);
  Attempt fully_implicit(const State& state, double dt, State& next, const SourceHook* src);

  // rhs of u with scratch buffers; returns false on non-finite fluxes
  bool eval_rhs_u(std::span<const double> u, std::span<const double> v, double t,
                  std::span<double> out, const SourceHook* src);
  void eval_rhs_v(std::span<const double> u, std::span<const double> v, double t,
                  std::span<double> out, const SourceHook* src);

  bool positivity_ok(std::span<const double> u) const;

  Grid grid_;
  Scenario sc_;
  StepControl control_;
  HelmholtzSolver helmholtz_;
  TridiagSolver thomas_;
  BlockTridiagSolver block_;
  // scratch
  std::vector<double> dflux_, aflux_, lam_, a_, rate_, rate2_;
  std::vector<double> k1u_, k1v_, k2u_, k2v_, su_, sv_;
  std::vector<double> w_, g_, delta_, sub_, diag_, sup_, rexp_;
  std::vector<double> bA_, bB_, bC_, bR_, bX_;
};

}  // namespace ks1d
