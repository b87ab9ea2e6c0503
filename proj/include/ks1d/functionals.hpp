#pragma once

// Energy functionals, dissipation rates, identity residuals and inequality
// monitors evaluated on a discrete state. The time derivative of v entering
// the dissipations is always the exact semi-discrete right side
// Lap_h v - v + u, never a temporal finite difference, so the discrete
// summation-by-parts identities hold to roundoff.

#include <span>
#include <utility>
#include <vector>

#include "ks1d/grid.hpp"
#include "ks1d/nonlinearity.hpp"
#include "ks1d/types.hpp"

namespace ks1d {

// One output-time record; serializes to one CSV row in this column order.
struct FunctionalSample {
  double t = 0.0;
  double mass = 0.0;
  double sup_u = 0.0;
  double min_u = 0.0;
  double sup_v = 0.0;
  double L_value = 0.0;
  double F_value = 0.0;
  double D_value = 0.0;  // D, or D1 for the parabolic-elliptic variant
  double rhs_lemma = 0.0;
  double identity_residual = 0.0;
  double cross_term_residual = 0.0;
  double lambda_L1 = 0.0;
  double lambda_L2_sq = 0.0;
  double lambda_W11 = 0.0;
  double grad_term = 0.0;
  double uLambda_term = 0.0;
  double sobolev_slack = 0.0;
  double dt_used = 0.0;
};

inline constexpr const char* kSampleCsvHeader =
    "t,mass,sup_u,min_u,sup_v,L,F,D,rhs_lemma,identity_residual,cross_term_residual,"
    "lambda_L1,lambda_L2_sq,lambda_W11,grad_term,uLambda_term,sobolev_slack,dt_used";

// Shared per-state evaluations reused across the functionals (hot path).
struct StateCache {
  std::vector<double> lambda_u;  // Lambda(u_i)
  std::vector<double> a_u;       // a(u_i)
  std::vector<double> lap_v;     // Lap_h v
  std::vector<double> rhs_v;     // Lap_h v - v + u
  void compute(const Grid& grid, const State& s, const Nonlinearity& nl);
};

double mass(const Grid& grid, const State& s);

// Classical free energy: sum b(u) dx - sum u v dx + (|v|^2 + |v_x|^2)/2.
double lyapunov_L(const Grid& grid, const State& s, const Nonlinearity& nl);

// (d1, d2) with d1 = |dt v|_{L2}^2 from the semi-discrete right side and
// d2 = sum over interfaces of ubar ((dLambda/dx)/ubar - dv/dx)^2 dx.
std::pair<double, double> lyapunov_dissipation(const Grid& grid, const State& s,
                                               const Nonlinearity& nl);
std::pair<double, double> lyapunov_dissipation(const Grid& grid, const State& s,
                                               const Nonlinearity& nl, const StateCache& c);

struct SecondEnergy {
  double F = 0.0;
  double grad_term = 0.0;     // sum (dLambda/dx)^2 / ubar dx
  double uLambda_term = 0.0;  // sum u Lambda(u) dx
};
SecondEnergy functional_F(const Grid& grid, const State& s, const Nonlinearity& nl);
SecondEnergy functional_F(const Grid& grid, const State& s, const Nonlinearity& nl,
                          const StateCache& c);

double dissipation_D(const Grid& grid, const State& s, const Nonlinearity& nl,
                     Variant variant = Variant::ParabolicParabolic);
double dissipation_D(const Grid& grid, const State& s, const Nonlinearity& nl, Variant variant,
                     const StateCache& c);

// Right side of the F-identity: sum a(u) u (v + dt v)^2 / 4 dx, or
// sum a(u) u v^2 / 4 dx in the parabolic-elliptic variant.
double lemma_rhs(const Grid& grid, const State& s, const Nonlinearity& nl, Variant variant);
double lemma_rhs(const Grid& grid, const State& s, const Nonlinearity& nl, Variant variant,
                 const StateCache& c);

enum class ResidualMode { Forward, Centered };

// (F(next) - F(prev))/dt + D(mid) - RHS(mid) over one accepted step.
// Forward evaluates mid-quantities at prev; Centered at the state average
// (used by convergence studies).
double identity_residual(const Grid& grid, const State& prev, const State& next,
                         const Nonlinearity& nl, Variant variant,
                         ResidualMode mode = ResidualMode::Forward);

struct CrossTermCheck {
  double residual = 0.0;  // |gradient side + potential side|
  double scale = 0.0;     // 1 + sum of absolute contributions
};
CrossTermCheck cross_term_residual(const Grid& grid, const State& s, const Nonlinearity& nl,
                                   Variant variant = Variant::ParabolicParabolic);
CrossTermCheck cross_term_residual(const Grid& grid, const State& s, const Nonlinearity& nl,
                                   Variant variant, const StateCache& c);

// Per-state slacks/ratios for the a-priori inequalities; constants the
// analysis leaves existential are reported as running extrema by the caller.
struct InequalityMonitors {
  double lambda_L1 = 0.0;
  double lambda_L2_sq = 0.0;
  double lambda_W11 = 0.0;
  double sup_abs_lambda = 0.0;
  double sobolev_slack = 0.0;      // (|Lambda|_L1 + TV) - max|Lambda|, >= 0
  double r31 = 0.0;                // lambda_L2_sq / (M+1)
  double r32 = 0.0;                // uLambda - M^{3/2} sqrt(grad_term)
  double r41 = 0.0;                // F - grad_term/4 (lower envelope of -C2)
  double prop31_pointwise_slack = 0.0;  // min_i [maxLam2 + (4 a^2/e^2) u_i - Lambda(u_i)^2]
  double grad_term = 0.0;
  double uLambda_term = 0.0;
  double F_value = 0.0;
};
InequalityMonitors inequality_monitors(const Grid& grid, const State& s, const Nonlinearity& nl,
                                       double M);
InequalityMonitors inequality_monitors(const Grid& grid, const State& s, const Nonlinearity& nl,
                                       double M, const StateCache& c);

// Exponentially weighted running integral of a nonnegative integrand g(t):
// value(t) ~ int_0^t e^{s-t} g(s) ds by trapezoid, renormalized each update.
class WeightedDissipationAccumulator {
 public:
  void add(double t, double integrand);
  double value() const { return value_; }
  double supremum() const { return sup_; }

 private:
  bool started_ = false;
  double t_prev_ = 0.0, g_prev_ = 0.0, value_ = 0.0, sup_ = 0.0;
};

// Integrand of the weighted dissipation bound: grad_term + sum ubar (dv/dx)^2 dx.
double weighted_dissipation_integrand(const Grid& grid, const State& s, const Nonlinearity& nl);

}  // namespace ks1d
