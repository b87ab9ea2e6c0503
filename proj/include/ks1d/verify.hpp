#pragma once

// Independent correctness harness: manufactured solutions with analytically
// induced sources, observed-order estimation, and two-grid comparison with
// exact cell-average restriction.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "ks1d/run.hpp"
#include "ks1d/scenario.hpp"

namespace ks1d {

// Closed-form space-time fields with zero x-derivative at both endpoints and
// a uniform positive lower bound on u.
struct ManufacturedCase {
  std::function<double(double, double)> u, u_t, u_x, u_xx;
  std::function<double(double, double)> v, v_t, v_x, v_xx;
  double u_min = 0.0;

  static ManufacturedCase steady(double m);
  // u* = 2 + e^{-t} cos(pi x), v* = 2 + e^{-t} cos(pi x) / 2
  static ManufacturedCase decaying_cosine();
};

// Sources that make (u*, v*) an exact solution of the sourced system:
//   S_u = u*_t - d/dx( a(u*) u*_x - u* v*_x ),  S_v = v*_t - v*_xx + v* - u*.
std::pair<double, double> mms_sources(const ManufacturedCase& mc, const Nonlinearity& nl, double t,
                                      double x);

SourceHook make_source_hook(const ManufacturedCase& mc, const Nonlinearity& nl);

// Least-squares slope of log(err) against log(h) over all pairs.
double observed_order(std::span<const double> h, std::span<const double> err);

struct OrderReport {
  std::vector<int> cells;
  std::vector<double> dts;
  std::vector<double> err_u, err_v;
  double order_u = 0.0, order_v = 0.0;
  bool exact = false;        // all errors at roundoff
  bool monotone = true;      // errors strictly decreasing; else inconclusive
  std::string label;

  std::string to_text() const;
  std::string to_csv() const;  // N, dt, error_u, error_v
};

// Spatial study: runs the sourced system on each resolution with
// dt = base.dt_initial * (N0/N)^2 (fixed step), errors against (u*, v*) at
// t_end in the discrete L2 norm.
OrderReport mms_convergence(const ManufacturedCase& mc, const Scenario& base,
                            std::span<const int> resolutions);

// Temporal study at fixed resolution: errors against a run at ref_dt.
OrderReport mms_temporal_convergence(const ManufacturedCase& mc, const Scenario& base,
                                     std::span<const double> dts, double ref_dt);

// Exact cell-average restriction; fine.size() must be a multiple of n_coarse.
std::vector<double> restrict_to_coarse(std::span<const double> fine, int n_coarse);

struct CompareReport {
  int n_coarse = 0, n_fine = 0;
  TerminationStatus status_coarse, status_fine;
  std::size_t shared_samples = 0;
  double max_u_gap_l2 = 0.0;  // max over shared sample times
  std::map<std::string, double> functional_gaps;  // max |fine - coarse| per column
  double t_stop_shift_rel = 0.0;  // for early-terminating pairs

  std::string to_text() const;
};

// Runs the scenario at both resolutions (the fine run with its dt bounds
// scaled by dt_fine_factor), restricts the fine solution by cell averaging
// and reports worst-case gaps over the shared sample times. The conclusion
// is symmetric in the argument order. Requires a 4x resolution ratio.
CompareReport reference_compare(const Scenario& scenario, int n_coarse, int n_fine,
                                double dt_fine_factor);

}  // namespace ks1d
