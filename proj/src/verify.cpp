#include "ks1d/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ks1d {

namespace {
constexpr double kPi = 3.141592653589793;

// Drives a fixed-step run of the sourced system from the manufactured
// initial data; throws if any step rejects (a study must stay inside the
// stability region by construction).
State drive_fixed(const ManufacturedCase& mc, const Scenario& proto, int cells, double dt,
                  double t_end) {
  Scenario sc = proto;
  sc.cells = cells;
  const Grid grid(cells);
  TimeStepper stepper(grid, sc);
  const SourceHook src = make_source_hook(mc, sc.nonlinearity);

  State state(grid, 0.0);
  for (int i = 0; i < cells; ++i) {
    state.u[static_cast<std::size_t>(i)] = mc.u(0.0, grid.center(i));
    state.v[static_cast<std::size_t>(i)] = mc.v(0.0, grid.center(i));
  }
  if (sc.variant == Variant::ParabolicElliptic) {
    HelmholtzSolver hs(grid);
    hs.solve(state.u, state.v);
  }

  const long n_steps = std::lround(t_end / dt);
  State next;
  for (long k = 0; k < n_steps; ++k) {
    const double step = (k + 1 == n_steps) ? (t_end - state.t) : dt;
    const auto att = stepper.attempt(state, step, next, &src);
    if (!att.accepted)
      throw std::runtime_error("manufactured study: step rejected (" + att.reason + ")");
    std::swap(state, next);
  }
  return state;
}

double l2_error_against(const Grid& grid, std::span<const double> field,
                        const std::function<double(double, double)>& exact, double t) {
  double acc = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double d = field[static_cast<std::size_t>(i)] - exact(t, grid.center(i));
    acc += d * d;
  }
  return std::sqrt(acc * grid.dx);
}

}  // namespace

ManufacturedCase ManufacturedCase::steady(double m) {
  ManufacturedCase mc;
  auto cst = [m](double, double) { return m; };
  auto zero = [](double, double) { return 0.0; };
  mc.u = cst;
  mc.v = cst;
  mc.u_t = zero;
  mc.u_x = zero;
  mc.u_xx = zero;
  mc.v_t = zero;
  mc.v_x = zero;
  mc.v_xx = zero;
  mc.u_min = m;
  return mc;
}

ManufacturedCase ManufacturedCase::decaying_cosine() {
  ManufacturedCase mc;
  const double kappa = 0.5;
  mc.u = [](double t, double x) { return 2.0 + std::exp(-t) * std::cos(kPi * x); };
  mc.u_t = [](double t, double x) { return -std::exp(-t) * std::cos(kPi * x); };
  mc.u_x = [](double t, double x) { return -kPi * std::exp(-t) * std::sin(kPi * x); };
  mc.u_xx = [](double t, double x) { return -kPi * kPi * std::exp(-t) * std::cos(kPi * x); };
  mc.v = [kappa](double t, double x) { return 2.0 + kappa * std::exp(-t) * std::cos(kPi * x); };
  mc.v_t = [kappa](double t, double x) { return -kappa * std::exp(-t) * std::cos(kPi * x); };
  mc.v_x = [kappa](double t, double x) { return -kappa * kPi * std::exp(-t) * std::sin(kPi * x); };
  mc.v_xx = [kappa](double t, double x) {
    return -kappa * kPi * kPi * std::exp(-t) * std::cos(kPi * x);
  };
  mc.u_min = 1.0;
  return mc;
}

std::pair<double, double> mms_sources(const ManufacturedCase& mc, const Nonlinearity& nl, double t,
                                      double x) {
  const double u = mc.u(t, x);
  const double ux = mc.u_x(t, x);
  const double uxx = mc.u_xx(t, x);
  const double vx = mc.v_x(t, x);
  const double vxx = mc.v_xx(t, x);
  // d/dx(a(u) u_x) = a'(u) u_x^2 + a(u) u_xx ;  d/dx(u v_x) = u_x v_x + u v_xx
  const double diff = nl.a_prime(u) * ux * ux + nl.a(u) * uxx;
  const double adv = ux * vx + u * vxx;
  const double s_u = mc.u_t(t, x) - diff + adv;
  const double s_v = mc.v_t(t, x) - vxx + mc.v(t, x) - u;
  return {s_u, s_v};
}

SourceHook make_source_hook(const ManufacturedCase& mc, const Nonlinearity& nl) {
  SourceHook hook;
  hook.s_u = [&mc, &nl](double t, double x) { return mms_sources(mc, nl, t, x).first; };
  hook.s_v = [&mc, &nl](double t, double x) { return mms_sources(mc, nl, t, x).second; };
  return hook;
}

double observed_order(std::span<const double> h, std::span<const double> err) {
  if (h.size() != err.size() || h.size() < 2)
    throw std::invalid_argument("observed_order: need >= 2 matched points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(std::max(err[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string OrderReport::to_text() const {
  std::ostringstream os;
  os << "order study" << (label.empty() ? "" : " [" + label + "]") << "\n";
  os << "  N        dt            error_u       error_v\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    os << "  " << cells[i] << "  " << dts[i] << "  " << err_u[i] << "  " << err_v[i] << "\n";
  }
  if (exact) {
    os << "  observed order: exact (errors at roundoff)\n";
  } else {
    os << "  observed order: u " << order_u << ", v " << order_v
       << (monotone ? "" : "  [INCONCLUSIVE: non-monotone errors]") << "\n";
  }
  return os.str();
}

std::string OrderReport::to_csv() const {
  std::ostringstream os;
  os << "N,dt,error_u,error_v\n";
  for (std::size_t i = 0; i < cells.size(); ++i)
    os << cells[i] << "," << dts[i] << "," << err_u[i] << "," << err_v[i] << "\n";
  return os.str();
}

namespace {

void finalize_order_report(OrderReport& rep, double scale) {
  const std::size_t m = rep.err_u.size();
  rep.exact = true;
  for (std::size_t i = 0; i < m; ++i) {
    if (rep.err_u[i] > 1e-12 * scale || rep.err_v[i] > 1e-12 * scale) rep.exact = false;
  }
  for (std::size_t i = 1; i < m; ++i) {
    if (!(rep.err_u[i] < rep.err_u[i - 1])) rep.monotone = false;
  }
  if (!rep.exact) {
    std::vector<double> h(m);
    for (std::size_t i = 0; i < m; ++i)
      h[i] = (rep.cells[i] > 0) ? 1.0 / static_cast<double>(rep.cells[i]) : rep.dts[i];
    rep.order_u = observed_order(h, rep.err_u);
    rep.order_v = observed_order(h, rep.err_v);
  }
}

}  // namespace

OrderReport mms_convergence(const ManufacturedCase& mc, const Scenario& base,
                            std::span<const int> resolutions) {
  if (resolutions.size() < 3)
    throw std::invalid_argument("mms_convergence: need at least 3 resolutions");
  OrderReport rep;
  rep.label = "spatial";
  const double n0 = static_cast<double>(resolutions[0]);
  for (int cells : resolutions) {
    const double ratio = n0 / static_cast<double>(cells);
    const double dt = base.dt_initial * ratio * ratio;  // dt ~ dx^2
    const State final = drive_fixed(mc, base, cells, dt, base.t_end);
    const Grid grid(cells);
    rep.cells.push_back(cells);
    rep.dts.push_back(dt);
    rep.err_u.push_back(l2_error_against(grid, final.u, mc.u, base.t_end));
    rep.err_v.push_back(l2_error_against(grid, final.v, mc.v, base.t_end));
  }
  finalize_order_report(rep, 1.0 + std::abs(mc.u(0.0, 0.5)));
  return rep;
}

OrderReport mms_temporal_convergence(const ManufacturedCase& mc, const Scenario& base,
                                     std::span<const double> dts, double ref_dt) {
  if (dts.size() < 2) throw std::invalid_argument("temporal study: need at least 2 dts");
  OrderReport rep;
  rep.label = "temporal";
  const State ref = drive_fixed(mc, base, base.cells, ref_dt, base.t_end);
  const Grid grid(base.cells);
  for (double dt : dts) {
    const State final = drive_fixed(mc, base, base.cells, dt, base.t_end);
    double du = 0.0, dv = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      du += (final.u[i] - ref.u[i]) * (final.u[i] - ref.u[i]);
      dv += (final.v[i] - ref.v[i]) * (final.v[i] - ref.v[i]);
    }
    rep.cells.push_back(0);  // fixed grid; order runs against dt
    rep.dts.push_back(dt);
    rep.err_u.push_back(std::sqrt(du * grid.dx));
    rep.err_v.push_back(std::sqrt(dv * grid.dx));
  }
  finalize_order_report(rep, 1.0 + std::abs(mc.u(0.0, 0.5)));
  return rep;
}

std::vector<double> restrict_to_coarse(std::span<const double> fine, int n_coarse) {
  const std::size_t nf = fine.size();
  const std::size_t nc = static_cast<std::size_t>(n_coarse);
  if (nc == 0 || nf % nc != 0)
    throw std::invalid_argument("restrict_to_coarse: resolutions must nest");
  const std::size_t k = nf / nc;
  std::vector<double> coarse(nc, 0.0);
  for (std::size_t i = 0; i < nc; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) acc += fine[i * k + j];
    coarse[i] = acc / static_cast<double>(k);
  }
  return coarse;
}

std::string CompareReport::to_text() const {
  std::ostringstream os;
  auto status_name = [](const TerminationStatus& st) {
    switch (st.kind) {
      case TerminationKind::Completed: return "completed";
      case TerminationKind::BlowupSuspected: return "blowup_suspected";
      case TerminationKind::StepFailure: return "step_failure";
    }
    return "?";
  };
  os << "two-grid comparison N=" << n_coarse << " vs N=" << n_fine << "\n";
  os << "  status: " << status_name(status_coarse) << " (t=" << status_coarse.t_stop << ") vs "
     << status_name(status_fine) << " (t=" << status_fine.t_stop << ")\n";
  os << "  shared samples: " << shared_samples << "\n";
  os << "  max L2 gap of u (fine restricted): " << max_u_gap_l2 << "\n";
  for (const auto& [name, gap] : functional_gaps) os << "  max |gap| " << name << ": " << gap << "\n";
  if (t_stop_shift_rel > 0.0) os << "  relative t_stop shift: " << t_stop_shift_rel << "\n";
  return os.str();
}

CompareReport reference_compare(const Scenario& scenario, int n_coarse, int n_fine,
                                double dt_fine_factor) {
  if (n_coarse > n_fine) std::swap(n_coarse, n_fine);
  if (n_fine < 4 * n_coarse)
    throw std::invalid_argument("reference_compare: need n_fine >= 4 * n_coarse");
  if (n_fine % n_coarse != 0)
    throw std::invalid_argument("reference_compare: resolutions must nest");

  Scenario sc_c = scenario;
  sc_c.cells = n_coarse;
  Scenario sc_f = scenario;
  sc_f.cells = n_fine;
  sc_f.dt_initial *= dt_fine_factor;
  sc_f.dt_max *= dt_fine_factor;
  sc_f.dt_min = std::min(sc_f.dt_min, sc_f.dt_initial);
  // pin a common cadence so the sample timestamps agree
  const double cadence = scenario.effective_output_interval();
  sc_c.output_interval = cadence;
  sc_f.output_interval = cadence;

  RunOptions opts;
  opts.store_states = true;
  const RunReport rc = run(sc_c, opts);
  const RunReport rf = run(sc_f, opts);

  CompareReport rep;
  rep.n_coarse = n_coarse;
  rep.n_fine = n_fine;
  rep.status_coarse = rc.status;
  rep.status_fine = rf.status;

  const std::size_t m = std::min(rc.samples.size(), rf.samples.size());
  rep.shared_samples = m;
  const Grid gc(n_coarse);
  for (std::size_t k = 0; k < m; ++k) {
    if (std::abs(rc.samples[k].t - rf.samples[k].t) > 1e-9 * (1.0 + rc.samples[k].t)) break;
    const auto restricted = restrict_to_coarse(rf.sampled_states[k].u, n_coarse);
    double acc = 0.0;
    for (std::size_t i = 0; i < gc.size(); ++i) {
      const double d = restricted[i] - rc.sampled_states[k].u[i];
      acc += d * d;
    }
    rep.max_u_gap_l2 = std::max(rep.max_u_gap_l2, std::sqrt(acc * gc.dx));
    auto track = [&](const char* name, double a, double b) {
      auto& slot = rep.functional_gaps[name];
      slot = std::max(slot, std::abs(a - b));
    };
    track("sup_u", rc.samples[k].sup_u, rf.samples[k].sup_u);
    track("mass", rc.samples[k].mass, rf.samples[k].mass);
    track("L", rc.samples[k].L_value, rf.samples[k].L_value);
    track("F", rc.samples[k].F_value, rf.samples[k].F_value);
    track("lambda_W11", rc.samples[k].lambda_W11, rf.samples[k].lambda_W11);
  }

  const bool both_stopped_early = rc.status.kind != TerminationKind::Completed &&
                                  rf.status.kind != TerminationKind::Completed;
  if (both_stopped_early && rc.status.t_stop > 0.0) {
    rep.t_stop_shift_rel =
        std::abs(rf.status.t_stop - rc.status.t_stop) / std::max(rc.status.t_stop, 1e-300);
  }
  return rep;
}

}  // namespace ks1d
