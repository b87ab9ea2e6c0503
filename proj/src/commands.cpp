#include "ks1d/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "ks1d/report_io.hpp"
#include "ks1d/run.hpp"
#include "ks1d/scenario.hpp"
#include "ks1d/verify.hpp"

namespace ks1d {

namespace {

namespace fs = std::filesystem;

int status_exit_code(TerminationKind k) {
  switch (k) {
    case TerminationKind::Completed: return 0;
    case TerminationKind::BlowupSuspected: return 2;
    case TerminationKind::StepFailure: return 3;
  }
  return 3;
}

struct SuiteCheck {
  bool all_pass = true;
  std::string first_miss;

  void expect(const std::string& name, double value, double threshold, bool pass) {
    std::printf("[verify] %-46s %13.6g  (threshold %g)  %s\n", name.c_str(), value, threshold,
                pass ? "PASS" : "FAIL");
    if (!pass && all_pass) {
      all_pass = false;
      first_miss = name;
    }
    if (!pass) all_pass = false;
  }
};

Scenario steady_scenario(StepperKind stepper, Variant variant) {
  Scenario sc;
  sc.variant = variant;
  sc.nonlinearity = Nonlinearity::power(1.0);
  sc.initial_u = {InitialProfile::Constant, 1.0, 0.0};
  sc.initial_v = sc.initial_u;
  sc.cells = 32;
  sc.dt_initial = 1e-3;
  sc.dt_min = 1e-12;
  sc.dt_max = 1e-2;
  sc.t_end = 0.2;
  sc.t0_monitor = 0.1;
  sc.stepper = stepper;
  return sc;
}

Scenario bump_scenario(double p, double mass, int cells, double t_end, StepperKind stepper,
                       AdvectionScheme scheme, Variant variant) {
  Scenario sc;
  sc.variant = variant;
  sc.nonlinearity = Nonlinearity::power(p);
  sc.initial_u = {InitialProfile::Cosine, mass, 1.0};
  sc.initial_v = sc.initial_u;
  sc.cells = cells;
  sc.dt_initial = 1e-5;
  sc.dt_min = 1e-13;
  sc.dt_max = 1e-2;
  sc.t_end = t_end;
  sc.t0_monitor = std::min(0.5, 0.5 * t_end);
  sc.stepper = stepper;
  sc.advection_scheme = scheme;
  return sc;
}

// Max per-step identity residual of a fixed-step Heun run with centered
// residual evaluation; used by the identity-order studies.
double residual_study_max(Variant variant, AdvectionScheme scheme, int cells, double t_end) {
  Scenario sc = bump_scenario(1.0, 2.0, cells, t_end, StepperKind::ExplicitRK, scheme, variant);
  sc.initial_u.amplitude = 0.5;
  sc.initial_v = sc.initial_u;
  const double dt = 0.2 / (static_cast<double>(cells) * cells);
  sc.dt_initial = dt;
  sc.dt_min = dt * 1e-6;
  sc.dt_max = dt;
  sc.t0_monitor = 0.5 * t_end;
  RunOptions opts;
  opts.residual_mode = ResidualMode::Centered;
  const RunReport rep = run(sc, opts);
  if (rep.status.kind != TerminationKind::Completed)
    throw std::runtime_error("identity study run did not complete: " + rep.status.reason);
  return rep.properties.max_identity_residual;
}

int verify_steady(SuiteCheck& check) {
  for (StepperKind stepper :
       {StepperKind::ExplicitRK, StepperKind::IMEX1, StepperKind::FullyImplicit}) {
    for (Variant variant : {Variant::ParabolicParabolic, Variant::ParabolicElliptic}) {
      const Scenario sc = steady_scenario(stepper, variant);
      RunOptions opts;
      opts.store_states = true;
      const RunReport rep = run(sc, opts);
      double drift = 0.0;
      const State& final = rep.sampled_states.back();
      for (double ui : final.u) drift = std::max(drift, std::abs(ui - 1.0));
      for (double vi : final.v) drift = std::max(drift, std::abs(vi - 1.0));
      std::ostringstream name;
      name << "steady drift (stepper " << static_cast<int>(stepper) << ", variant "
           << static_cast<int>(variant) << ")";
      check.expect(name.str(), drift, 1e-12, drift <= 1e-12);
      const double d_err = std::abs(rep.samples.back().D_value - 0.125);
      check.expect("steady D - 0.125", d_err, 1e-12, d_err <= 1e-12);
      check.expect("steady identity residual", rep.properties.max_identity_residual, 1e-12,
                   rep.properties.max_identity_residual <= 1e-12);
    }
  }
  return check.all_pass ? 0 : 4;
}

int verify_identities(SuiteCheck& check) {
  // cross-term identity on a production bump run
  {
    Scenario sc = bump_scenario(1.0, 5.0, 256, 2.0, StepperKind::IMEX1, AdvectionScheme::Upwind,
                                Variant::ParabolicParabolic);
    const RunReport rep = run(sc);
    check.expect("cross-term residual/scale (bump, N=256)",
                 rep.properties.max_cross_residual_scaled, 1e-10,
                 rep.properties.max_cross_residual_scaled <= 1e-10);
  }
  // energy-identity residual order under simultaneous refinement
  for (Variant variant : {Variant::ParabolicParabolic, Variant::ParabolicElliptic}) {
    const std::vector<int> cells = {64, 128, 256, 512};
    std::vector<double> h, res;
    for (int n : cells) {
      h.push_back(1.0 / n);
      res.push_back(residual_study_max(variant, AdvectionScheme::Central, n, 0.1));
    }
    const double order = observed_order(h, res);
    const std::string name = (variant == Variant::ParabolicParabolic)
                                 ? "identity residual order (central, pp)"
                                 : "identity residual order (central, pe)";
    check.expect(name, order, 1.8, order >= 1.8);
  }
  return check.all_pass ? 0 : 4;
}

int verify_mms(SuiteCheck& check) {
  const ManufacturedCase mc = ManufacturedCase::decaying_cosine();
  Scenario base;
  base.nonlinearity = Nonlinearity::power(1.0);
  base.initial_u = {InitialProfile::Constant, 2.0, 0.0};
  base.initial_v = base.initial_u;
  base.cells = 32;
  base.dt_initial = 0.2 / (32.0 * 32.0);
  base.dt_min = 1e-13;
  base.dt_max = 1.0;
  base.t_end = 0.25;
  base.t0_monitor = 0.1;
  base.stepper = StepperKind::ExplicitRK;

  const std::vector<int> cells = {32, 64, 128, 256};
  {
    Scenario sc = base;
    sc.advection_scheme = AdvectionScheme::Central;
    const OrderReport rep = mms_convergence(mc, sc, cells);
    std::puts(rep.to_text().c_str());
    check.expect("mms spatial order u (central)", rep.order_u, 1.9, rep.order_u >= 1.9);
    check.expect("mms spatial order v (central)", rep.order_v, 1.9, rep.order_v >= 1.9);
  }
  {
    Scenario sc = base;
    sc.advection_scheme = AdvectionScheme::Upwind;
    const OrderReport rep = mms_convergence(mc, sc, cells);
    std::puts(rep.to_text().c_str());
    check.expect("mms spatial order u (upwind)", rep.order_u, 0.9, rep.order_u >= 0.9);
    check.expect("mms spatial order v (upwind)", rep.order_v, 0.9, rep.order_v >= 0.9);
  }
  {
    Scenario sc = base;
    sc.cells = 64;
    sc.stepper = StepperKind::IMEX1;
    sc.t_end = 0.5;
    const std::vector<double> dts = {3e-3, 1.5e-3, 7.5e-4};
    const OrderReport rep = mms_temporal_convergence(mc, sc, dts, 7.5e-4 / 64.0);
    std::puts(rep.to_text().c_str());
    const double order = std::min(rep.order_u, rep.order_v);
    check.expect("mms temporal order (imex1)", order, 0.9, order >= 0.9);
  }
  return check.all_pass ? 0 : 4;
}

int verify_compare(SuiteCheck& check) {
  {
    const Scenario sc = steady_scenario(StepperKind::IMEX1, Variant::ParabolicParabolic);
    const CompareReport rep = reference_compare(sc, 32, 128, 0.5);
    std::puts(rep.to_text().c_str());
    check.expect("steady two-grid u gap", rep.max_u_gap_l2, 1e-10, rep.max_u_gap_l2 <= 1e-10);
  }
  {
    // subcritical-mass bump: the transient relaxes to the constant state, so
    // the two-grid gap measures pure discretization error
    Scenario sc = bump_scenario(1.0, 2.5, 64, 4.0, StepperKind::IMEX1, AdvectionScheme::Upwind,
                                Variant::ParabolicParabolic);
    sc.initial_u.amplitude = 0.5;
    sc.initial_v = sc.initial_u;
    const CompareReport rep = reference_compare(sc, 128, 512, 0.5);
    std::puts(rep.to_text().c_str());
    const double rel = rep.functional_gaps.at("sup_u") / 2.5;
    check.expect("relaxing bump sup_u two-grid gap (rel)", rel, 0.05, rel <= 0.05);
  }
  return check.all_pass ? 0 : 4;
}

}  // namespace

int cmd_run(const std::string& config_path, const std::string& output_dir, bool dense) {
  Config cfg;
  try {
    cfg = load_config(config_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (cfg.sweep) {
    std::cerr << "error: " << config_path
              << ": config contains a sweep grid; use the sweep command\n";
    return 1;
  }
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << output_dir << "\n";
    return 1;
  }

  RunOptions opts;
  opts.dense = dense;
  const RunReport report = run(cfg.scenario, opts);

  write_samples_csv(output_dir + "/samples.csv", report.samples);
  if (dense) write_residuals_csv(output_dir + "/residuals.csv", report.step_records);
  {
    std::ofstream out(output_dir + "/report.txt");
    out << render_report(report);
  }
  write_plot_script(output_dir + "/plot.py");

  std::cout << render_report(report);
  return status_exit_code(report.status.kind);
}

int cmd_sweep(const std::string& config_path, const std::string& output_dir, int workers) {
  Config cfg;
  try {
    cfg = load_config(config_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (!cfg.sweep) {
    std::cerr << "error: " << config_path << ": config has no sweep grid\n";
    return 1;
  }
  if (cfg.scenario.nonlinearity.kind() != DiffusionKind::Power) {
    std::cerr << "error: sweeping the exponent requires a power-family nonlinearity\n";
    return 1;
  }
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << output_dir << "\n";
    return 1;
  }

  struct Cell {
    double p, mass;
  };
  std::vector<Cell> cells;
  for (double p : cfg.sweep->p)
    for (double m : cfg.sweep->mass) cells.push_back({p, m});

  std::vector<PhaseRow> rows(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> cursor{0};
  if (workers < 1) workers = 1;
  const int n_workers = std::min<std::size_t>(workers, cells.size());

  auto worker = [&] {
    for (;;) {
      const std::size_t k = cursor.fetch_add(1);
      if (k >= cells.size()) return;
      PhaseRow row;
      row.p = cells[k].p;
      row.mass = cells[k].mass;
      try {
        Scenario sc = cfg.scenario;
        sc.nonlinearity = Nonlinearity::power(cells[k].p);
        sc.initial_u.mass = cells[k].mass;
        sc.initial_v.mass = cells[k].mass;
        const RunReport rep = run(sc);
        row.status = rep.status.kind;
        row.sup_u_final = rep.samples.back().sup_u;
        row.t_stop = rep.status.t_stop;
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
      rows[k] = row;
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  write_phase_csv(output_dir + "/phase.csv", rows);

  bool any_error = false;
  std::ostringstream grid;
  grid << "== sweep summary ==\n";
  grid << "cells run: " << cells.size() << "\n";
  for (std::size_t k = 0; k < cells.size(); ++k) {
    grid << "  p=" << format_double(rows[k].p) << "  M=" << format_double(rows[k].mass) << "  ";
    if (!errors[k].empty()) {
      grid << "NO VERDICT: " << errors[k] << "\n";
      any_error = true;
    } else {
      grid << termination_name(rows[k].status) << "  sup_u_final=" << format_double(rows[k].sup_u_final)
           << "  t_stop=" << format_double(rows[k].t_stop) << "\n";
    }
  }
  {
    std::ofstream out(output_dir + "/sweep_report.txt");
    out << grid.str();
  }
  std::cout << grid.str();
  return any_error ? 3 : 0;
}

int cmd_verify(const std::string& suite) {
  SuiteCheck check;
  int rc = 1;
  try {
    if (suite == "steady") {
      rc = verify_steady(check);
    } else if (suite == "identities") {
      rc = verify_identities(check);
    } else if (suite == "mms") {
      rc = verify_mms(check);
    } else if (suite == "compare") {
      rc = verify_compare(check);
    } else {
      std::cerr << "error: unknown verify suite '" << suite
                << "' (available: mms, identities, steady, compare)\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: verify suite failed to run: " << e.what() << "\n";
    return 3;
  }
  if (rc != 0) std::cerr << "verify: threshold missed: " << check.first_miss << "\n";
  return rc;
}

}  // namespace ks1d
