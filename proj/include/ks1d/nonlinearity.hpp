#pragma once

// Nonlinear diffusion laws a(s) together with the derived potentials
//   Lambda(r) = \int_1^r a(s) ds
//   b(r)      with b'' = a(r)/r, b(1) = b'(1) = 0,
// plus empirical checks of the structural assumptions the rest of the solver
// relies on: boundedness of s*a(s) and divergence of \int_1^inf a.
//
// Values are immutable after construction and safe to share across threads.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ks1d {

enum class DiffusionKind { Power, Constant, Tabulated };

struct AssumptionReport {
  double alpha_estimate = 0.0;     // max of s*a(s) over the probe grid
  bool alpha_bounded = false;      // tail log-log slope of s*a(s) ~ 0
  double sa_tail_slope = 0.0;      // that slope, for the record
  double lambda_at_probe = 0.0;    // Lambda(1e12)
  double lambda_tail_slope = 0.0;  // last log-log slope of Lambda
  bool divergence_plausible = false;
  bool continuity_ok = true;       // sampled continuity (tabulated laws only)
  std::string summary;
};

class Nonlinearity {
 public:
  // a(s) = (1+s)^(-p), p >= 0. p = 1 is the critical law.
  static Nonlinearity power(double p);
  // a(s) = c, c > 0.
  static Nonlinearity constant(double c);
  // User-supplied law sampled at strictly increasing abscissae s >= 0 with
  // positive values; interpolation is linear in log a vs log(1+s), so a
  // power law tabulated on any grid is reproduced exactly. Extrapolation
  // continues the end segment's log-log slope.
  static Nonlinearity tabulated(std::vector<double> s, std::vector<double> a);

  DiffusionKind kind() const { return kind_; }
  double power_exponent() const { return p_; }
  double constant_value() const { return c_; }

  double a(double s) const;        // s >= 0
  double a_prime(double s) const;  // da/ds
  double lambda(double r) const;   // r >= 0
  double b(double r) const;        // r > 0

  // Generic quadrature route for Lambda, independent of the closed forms;
  // used directly for tabulated laws and kept public for cross-validation.
  double lambda_quadrature(double r, double rel_tol = 1e-10) const;

  // sup of s*a(s) sampled on a log grid over [0, 1e12].
  double alpha_estimate() const { return alpha_estimate_; }
  // Closed-form sup of s*a(s) where one exists (power laws with p >= 1).
  std::optional<double> alpha_exact() const;
  // max of Lambda(r)^2 over r in (0,1); enters the pointwise Lambda bound.
  double lambda_sup_sq_unit() const { return lambda_sup_sq_unit_; }

  AssumptionReport check_assumptions() const;

  // Batch evaluation for the per-step hot loops.
  void a_into(std::span<const double> s, std::span<double> out) const;
  void lambda_into(std::span<const double> r, std::span<double> out) const;
  void b_into(std::span<const double> r, std::span<double> out) const;

 private:
  Nonlinearity() = default;
  void finalize();  // alpha estimate, unit-interval Lambda sup, b cache

  double b_closed_or_cached(double r) const;
  double b_direct_quadrature(double r) const;
  bool has_closed_b() const;
  double table_log_interp(double s) const;  // log a at log1p(s)

  DiffusionKind kind_ = DiffusionKind::Power;
  double p_ = 1.0;  // Power
  double c_ = 1.0;  // Constant
  std::vector<double> tab_ls_;  // log(1+s) nodes
  std::vector<double> tab_la_;  // log a nodes

  double alpha_estimate_ = 0.0;
  double lambda_sup_sq_unit_ = 0.0;

  // Piecewise-quintic Hermite cache of b on a log grid, built once for laws
  // without a closed form. Node data: value, d b/dt, d^2 b/dt^2 with t = ln r.
  struct BCache {
    double t_min = 0.0, dt = 0.0;
    std::vector<double> val, d1, d2;
    bool covers(double t) const {
      return !val.empty() && t >= t_min && t <= t_min + dt * static_cast<double>(val.size() - 1);
    }
  };
  BCache bcache_;
  void build_b_cache();
};

}  // namespace ks1d
