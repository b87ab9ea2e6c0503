#include "ks1d/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ks1d/quadrature.hpp"

namespace ks1d {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kProbeTop = 1e12;

void require_nonneg(double s) {
  if (!(s >= 0.0)) throw std::domain_error("nonlinearity: argument must be nonnegative");
}

}  // namespace

Nonlinearity Nonlinearity::power(double p) {
  if (!(p >= 0.0) || !std::isfinite(p))
    throw std::invalid_argument("power law exponent must be finite and >= 0");
  Nonlinearity nl;
  nl.kind_ = DiffusionKind::Power;
  nl.p_ = p;
  nl.finalize();
  return nl;
}

Nonlinearity Nonlinearity::constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("constant diffusion value must be finite and positive");
  Nonlinearity nl;
  nl.kind_ = DiffusionKind::Constant;
  nl.c_ = c;
  nl.finalize();
  return nl;
}

Nonlinearity Nonlinearity::tabulated(std::vector<double> s, std::vector<double> a) {
  if (s.size() != a.size() || s.size() < 2)
    throw std::invalid_argument("tabulated law needs >= 2 matching samples");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] >= 0.0) || !std::isfinite(s[i]))
      throw std::invalid_argument("tabulated abscissae must be finite and >= 0");
    if (i > 0 && !(s[i] > s[i - 1]))
      throw std::invalid_argument("tabulated abscissae must be strictly increasing");
    if (!(a[i] > 0.0) || !std::isfinite(a[i]))
      throw std::invalid_argument("tabulated values must be finite and positive");
  }
  Nonlinearity nl;
  nl.kind_ = DiffusionKind::Tabulated;
  nl.tab_ls_.resize(s.size());
  nl.tab_la_.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    nl.tab_ls_[i] = std::log1p(s[i]);
    nl.tab_la_[i] = std::log(a[i]);
  }
  nl.finalize();
  return nl;
}

double Nonlinearity::table_log_interp(double s) const {
  const double x = std::log1p(s);
  const auto& xs = tab_ls_;
  const auto& ys = tab_la_;
  std::size_t hi = 1;
  if (x <= xs.front()) {
    hi = 1;
  } else if (x >= xs.back()) {
    hi = xs.size() - 1;
  } else {
    hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
  }
  const std::size_t lo = hi - 1;
  const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + w * (ys[hi] - ys[lo]);
}

double Nonlinearity::a(double s) const {
  require_nonneg(s);
  switch (kind_) {
    case DiffusionKind::Power:
      if (p_ == 0.0) return 1.0;
      if (p_ == 1.0) return 1.0 / (1.0 + s);
      return std::pow(1.0 + s, -p_);
    case DiffusionKind::Constant:
      return c_;
    case DiffusionKind::Tabulated:
      return std::exp(table_log_interp(s));
  }
  return 0.0;  // unreachable
}

double Nonlinearity::a_prime(double s) const {
  require_nonneg(s);
  switch (kind_) {
    case DiffusionKind::Power:
      if (p_ == 0.0) return 0.0;
      return -p_ * std::pow(1.0 + s, -p_ - 1.0);
    case DiffusionKind::Constant:
      return 0.0;
    case DiffusionKind::Tabulated: {
      // Each table segment is a power law C*(1+s)^m; differentiate it.
      const double x = std::log1p(s);
      std::size_t hi = 1;
      if (x > tab_ls_.front() && x < tab_ls_.back()) {
        hi = static_cast<std::size_t>(
            std::upper_bound(tab_ls_.begin(), tab_ls_.end(), x) - tab_ls_.begin());
      } else if (x >= tab_ls_.back()) {
        hi = tab_ls_.size() - 1;
      }
      const std::size_t lo = hi - 1;
      const double m = (tab_la_[hi] - tab_la_[lo]) / (tab_ls_[hi] - tab_ls_[lo]);
      return a(s) * m / (1.0 + s);
    }
  }
  return 0.0;  // unreachable
}

double Nonlinearity::lambda(double r) const {
  require_nonneg(r);
  switch (kind_) {
    case DiffusionKind::Power:
      if (p_ == 0.0) return r - 1.0;
      if (p_ == 1.0) return std::log1p(r) - kLn2;
      return (std::pow(1.0 + r, 1.0 - p_) - std::pow(2.0, 1.0 - p_)) / (1.0 - p_);
    case DiffusionKind::Constant:
      return c_ * (r - 1.0);
    case DiffusionKind::Tabulated:
      return lambda_quadrature(r);
  }
  return 0.0;  // unreachable
}

double Nonlinearity::lambda_quadrature(double r, double rel_tol) const {
  require_nonneg(r);
  if (r == 1.0) return 0.0;
  // Substitute s = e^t - 1 so wide ranges integrate over a short, smooth
  // interval: \int_1^r a(s) ds = \int a(e^t - 1) e^t dt.
  auto g = [this](double t) {
    const double et = std::exp(t);
    return a(et - 1.0) * et;
  };
  const double t1 = kLn2;  // log1p(1)
  const double t2 = std::log1p(r);
  const double lo = std::min(t1, t2);
  const double hi = std::max(t1, t2);
  const double val = quadrature::adaptive_simpson(g, lo, hi, rel_tol);
  return (r >= 1.0) ? val : -val;
}

bool Nonlinearity::has_closed_b() const {
  return kind_ == DiffusionKind::Constant || (kind_ == DiffusionKind::Power && (p_ == 0.0 || p_ == 1.0));
}

double Nonlinearity::b(double r) const {
  if (!(r > 0.0)) throw std::domain_error("b: argument must be strictly positive");
  return b_closed_or_cached(r);
}

double Nonlinearity::b_closed_or_cached(double r) const {
  if (kind_ == DiffusionKind::Constant || (kind_ == DiffusionKind::Power && p_ == 0.0)) {
    const double c = (kind_ == DiffusionKind::Constant) ? c_ : 1.0;
    return c * (r * std::log(r) - r + 1.0);
  }
  if (kind_ == DiffusionKind::Power && p_ == 1.0) {
    return r * std::log(r) - (1.0 + r) * (std::log1p(r) - kLn2);
  }
  const double t = std::log(r);
  if (!bcache_.covers(t)) return b_direct_quadrature(r);
  const double rel = (t - bcache_.t_min) / bcache_.dt;
  std::size_t k = static_cast<std::size_t>(rel);
  if (k >= bcache_.val.size() - 1) k = bcache_.val.size() - 2;
  const double tau = rel - static_cast<double>(k);
  // Quintic Hermite in t with nodal value/first/second derivatives.
  const double f0 = bcache_.val[k], f1 = bcache_.val[k + 1];
  const double g0 = bcache_.d1[k] * bcache_.dt, g1 = bcache_.d1[k + 1] * bcache_.dt;
  const double h0 = bcache_.d2[k] * bcache_.dt * bcache_.dt,
               h1 = bcache_.d2[k + 1] * bcache_.dt * bcache_.dt;
  const double t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau, t5 = t4 * tau;
  const double H0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  const double H1 = tau - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  const double H2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
  const double H3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  const double H4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
  const double H5 = 0.5 * t3 - t4 + 0.5 * t5;
  return f0 * H0 + g0 * H1 + h0 * H2 + f1 * H3 + g1 * H4 + h1 * H5;
}

double Nonlinearity::b_direct_quadrature(double r) const {
  // b(r) = \int_1^r (r - s) a(s)/s ds, the Fubini reduction of the nested
  // integral; with s = e^t the 1/s weight cancels and the integrand stays
  // smooth down to the positivity floor.
  if (r == 1.0) return 0.0;
  auto g = [this, r](double t) {
    const double s = std::exp(t);
    return (r - s) * a(s);
  };
  const double t2 = std::log(r);
  const double lo = std::min(0.0, t2);
  const double hi = std::max(0.0, t2);
  const double val = quadrature::adaptive_simpson(g, lo, hi, 1e-9);
  return (r >= 1.0) ? val : -val;
}

void Nonlinearity::build_b_cache() {
  // March cumulative b' and b away from the anchor r = 1 on a uniform grid
  // in t = ln r, with per-interval Gauss panels:
  //   b'(rR) = b'(rL) + I1,   I1 = \int a(e^t) dt
  //   b(rR)  = b(rL) + b'(rL) (rR - rL) + I2,  I2 = \int (rR - e^t) a(e^t) dt.
  const double t_lo = std::log(1e-14);
  const double t_hi = std::log(1e13);
  const std::size_t n_dn = 8192, n_up = 8192;
  const double dt_dn = (0.0 - t_lo) / static_cast<double>(n_dn);
  const double dt_up = (t_hi - 0.0) / static_cast<double>(n_up);
  const double dt = std::max(dt_dn, dt_up);
  // one shared uniform spacing keeps lookup trivial
  const std::size_t k0 = static_cast<std::size_t>(std::ceil(-t_lo / dt));
  const std::size_t k1 = static_cast<std::size_t>(std::ceil(t_hi / dt));
  const std::size_t n = k0 + k1 + 1;
  bcache_.t_min = -static_cast<double>(k0) * dt;
  bcache_.dt = dt;
  bcache_.val.assign(n, 0.0);
  bcache_.d1.assign(n, 0.0);
  bcache_.d2.assign(n, 0.0);

  auto node_t = [&](std::size_t k) { return bcache_.t_min + dt * static_cast<double>(k); };
  auto i1 = [this](double ta, double tb) {
    return quadrature::gauss7([this](double t) { return a(std::exp(t)); }, ta, tb);
  };
  auto i2 = [this](double ta, double tb, double rR) {
    return quadrature::gauss7([this, rR](double t) { return (rR - std::exp(t)) * a(std::exp(t)); },
                              ta, tb);
  };

  // upward sweep from the anchor node k0 (t = 0, b = b' = 0)
  double bp = 0.0, bv = 0.0;
  for (std::size_t k = k0; k + 1 < n; ++k) {
    const double ta = node_t(k), tb = node_t(k + 1);
    const double rL = std::exp(ta), rR = std::exp(tb);
    const double bv_next = bv + bp * (rR - rL) + i2(ta, tb, rR);
    const double bp_next = bp + i1(ta, tb);
    bcache_.val[k + 1] = bv_next;
    bcache_.d1[k + 1] = bp_next;  // still db/dr here; converted to db/dt below
    bv = bv_next;
    bp = bp_next;
  }
  // downward sweep
  bp = 0.0;
  bv = 0.0;
  for (std::size_t k = k0; k > 0; --k) {
    const double ta = node_t(k - 1), tb = node_t(k);
    const double rL = std::exp(ta), rR = std::exp(tb);
    const double bp_prev = bp - i1(ta, tb);
    const double bv_prev = bv - bp_prev * (rR - rL) - i2(ta, tb, rR);
    bcache_.val[k - 1] = bv_prev;
    bcache_.d1[k - 1] = bp_prev;
    bv = bv_prev;
    bp = bp_prev;
  }
  // convert to t-derivatives: db/dt = r b', d2b/dt2 = r b' + r^2 b'' with b'' = a(r)/r
  for (std::size_t k = 0; k < n; ++k) {
    const double r = std::exp(node_t(k));
    const double dbdr = bcache_.d1[k];
    bcache_.d1[k] = r * dbdr;
    bcache_.d2[k] = r * dbdr + r * a(r);
  }
}

void Nonlinearity::finalize() {
  // empirical sup of s*a(s) over {0} + a log grid up to 1e12
  const int per_decade = 16;
  const double lo = 1e-8;
  const int decades = 20;
  double best = 0.0;  // s = 0 contributes 0
  for (int i = 0; i <= per_decade * decades; ++i) {
    const double s = lo * std::pow(10.0, static_cast<double>(i) / per_decade);
    best = std::max(best, s * a(s));
  }
  alpha_estimate_ = best;

  // max of Lambda^2 on (0,1): Lambda is monotone, so it is attained at an end
  double sup = 0.0;
  for (double r : {1e-13, 1e-8, 1e-4, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.999}) {
    const double l = lambda(r);
    sup = std::max(sup, l * l);
  }
  lambda_sup_sq_unit_ = sup;

  if (!has_closed_b()) build_b_cache();
}

std::optional<double> Nonlinearity::alpha_exact() const {
  if (kind_ != DiffusionKind::Power) return std::nullopt;
  if (p_ == 1.0) return 1.0;  // sup s/(1+s)
  if (p_ > 1.0) {
    const double s = 1.0 / (p_ - 1.0);
    return s * std::pow(1.0 + s, -p_);
  }
  return std::nullopt;  // p < 1: unbounded
}

AssumptionReport Nonlinearity::check_assumptions() const {
  AssumptionReport rep;
  rep.alpha_estimate = alpha_estimate_;

  // tail log-log slope of s*a(s): bounded iff the slope has flattened out
  {
    const double s1 = kProbeTop / 10.0, s2 = kProbeTop;
    const double g1 = s1 * a(s1), g2 = s2 * a(s2);
    rep.sa_tail_slope = (std::log(g2) - std::log(g1)) / (std::log(s2) - std::log(s1));
    rep.alpha_bounded = rep.sa_tail_slope < 0.05;
  }

  // divergence heuristic for \int_1^inf a
  {
    const double l2 = lambda(kProbeTop);
    const double l1 = lambda(kProbeTop / 10.0);
    rep.lambda_at_probe = l2;
    rep.lambda_tail_slope = (l2 > 0.0 && l1 > 0.0)
                                ? (std::log(l2) - std::log(l1)) / std::log(10.0)
                                : 0.0;
    rep.divergence_plausible = (rep.lambda_tail_slope >= 0.0) && (l2 > 10.0);
  }

  if (kind_ == DiffusionKind::Tabulated) {
    double max_jump = 0.0;
    for (std::size_t i = 1; i < tab_la_.size(); ++i)
      max_jump = std::max(max_jump, std::abs(tab_la_[i] - tab_la_[i - 1]));
    rep.continuity_ok = max_jump < std::log(10.0);
  }

  std::ostringstream os;
  os << "alpha_estimate=" << rep.alpha_estimate << (rep.alpha_bounded ? " (bounded)" : " (UNBOUNDED: A1 fails)")
     << "; Lambda(1e12)=" << rep.lambda_at_probe
     << (rep.divergence_plausible ? " (divergence plausible)" : " (A2 fails: integral looks finite)")
     << (rep.continuity_ok ? "" : "; WARNING: sampled continuity suspect");
  rep.summary = os.str();
  return rep;
}

void Nonlinearity::a_into(std::span<const double> s, std::span<double> out) const {
  if (kind_ == DiffusionKind::Power && p_ == 1.0) {
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = 1.0 / (1.0 + s[i]);
    return;
  }
  if (kind_ == DiffusionKind::Constant || (kind_ == DiffusionKind::Power && p_ == 0.0)) {
    const double c = (kind_ == DiffusionKind::Constant) ? c_ : 1.0;
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = c;
    return;
  }
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = a(s[i]);
}

void Nonlinearity::lambda_into(std::span<const double> r, std::span<double> out) const {
  if (kind_ == DiffusionKind::Power && p_ == 1.0) {
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = std::log1p(r[i]) - kLn2;
    return;
  }
  if (kind_ == DiffusionKind::Constant || (kind_ == DiffusionKind::Power && p_ == 0.0)) {
    const double c = (kind_ == DiffusionKind::Constant) ? c_ : 1.0;
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = c * (r[i] - 1.0);
    return;
  }
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = lambda(r[i]);
}

void Nonlinearity::b_into(std::span<const double> r, std::span<double> out) const {
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = b(r[i]);
}

}  // namespace ks1d
