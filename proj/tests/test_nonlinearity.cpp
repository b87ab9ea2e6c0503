#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ks1d/nonlinearity.hpp"
#include "support/oracles.hpp"

using ks1d::DiffusionKind;
using ks1d::Nonlinearity;

namespace {

// log grid over [lo, hi]
std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

Nonlinearity tabulated_from_power(double p) {
  std::vector<double> s, a;
  s.push_back(0.0);
  a.push_back(1.0);
  for (double si : log_grid(1e-6, 1e13, 120)) {
    s.push_back(si);
    a.push_back(std::pow(1.0 + si, -p));
  }
  return Nonlinearity::tabulated(s, a);
}

}  // namespace

TEST_CASE("diffusion law point values") {
  const auto p1 = Nonlinearity::power(1.0);
  CHECK(p1.a(0.0) == 1.0);
  CHECK(p1.a(1.0) == 0.5);
  const auto c1 = Nonlinearity::constant(1.0);
  CHECK(c1.a(7.3) == 1.0);
  CHECK_THROWS_AS((void)p1.a(-0.5), std::domain_error);

  // a(s)(1+s) = 1 for the critical law, up to one rounding
  for (double s : {0.0, 0.3, 1.0, 2.0, 17.5, 1e6}) {
    CHECK(std::abs(p1.a(s) * (1.0 + s) - 1.0) <= 2.3e-16);
  }
}

TEST_CASE("lambda: normalization, closed forms and quadrature oracle") {
  const auto p1 = Nonlinearity::power(1.0);
  const auto p2 = Nonlinearity::power(2.0);
  const auto c1 = Nonlinearity::constant(1.0);
  const auto tab = tabulated_from_power(1.0);

  for (const Nonlinearity* nl : {&p1, &p2, &c1, &tab}) CHECK(nl->lambda(1.0) == doctest::Approx(0.0).epsilon(1e-14));

  // independent Romberg oracle for int_1^3 ds/(1+s)
  const double oracle = oracles::romberg([](double s) { return 1.0 / (1.0 + s); }, 1.0, 3.0);
  CHECK(oracle == doctest::Approx(0.6931471805599453).epsilon(1e-12));
  CHECK(p1.lambda(3.0) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(p1.lambda(3.0) == doctest::Approx(0.6931471805599453).epsilon(1e-14));

  CHECK(c1.lambda(5.0) == doctest::Approx(4.0).epsilon(1e-14));

  // tabulated law reproduces the power law it was sampled from
  for (double r : {0.0, 0.37, 1.0, 3.0, 120.0, 4.2e5}) {
    CHECK(tab.lambda(r) == doctest::Approx(p1.lambda(r)).epsilon(1e-9));
    CHECK(tab.a(r) == doctest::Approx(p1.a(r)).epsilon(1e-12));
  }
}

TEST_CASE("b: normalization, closed forms and nested-quadrature oracle") {
  const auto p1 = Nonlinearity::power(1.0);
  const auto p2 = Nonlinearity::power(2.0);
  const auto c1 = Nonlinearity::constant(1.0);

  CHECK(p1.b(1.0) == 0.0);
  CHECK(p2.b(1.0) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(c1.b(1.0) == 0.0);

  // b(e) for a = 1: nested double quadrature of 1/s (computed by the oracle,
  // closed form e*1 - e + 1 = 1)
  const double be =
      oracles::double_integral_antiderivative([](double s) { return 1.0 / s; }, std::exp(1.0));
  CHECK(be == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(c1.b(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-13));

  // critical law at r = 3: 3 ln 3 - 4 ln 2
  const double b3 = oracles::double_integral_antiderivative(
      [](double s) { return 1.0 / (s * (1.0 + s)); }, 3.0);
  CHECK(b3 == doctest::Approx(0.5232481437645480).epsilon(1e-11));
  CHECK(p1.b(3.0) == doctest::Approx(0.5232481437645480).epsilon(1e-13));

  // general power law goes through the cached quadrature backend
  const double b3_p2 = oracles::double_integral_antiderivative(
      [](double s) { return 1.0 / ((1.0 + s) * (1.0 + s) * s); }, 3.0);
  CHECK(p2.b(3.0) == doctest::Approx(b3_p2).epsilon(1e-10));
  const double b02_p2 = oracles::double_integral_antiderivative(
      [](double s) { return 1.0 / ((1.0 + s) * (1.0 + s) * s); }, 0.2);
  CHECK(p2.b(0.2) == doctest::Approx(b02_p2).epsilon(1e-10));

  CHECK_THROWS_AS((void)p1.b(0.0), std::domain_error);
  CHECK_THROWS_AS((void)p1.b(-1.0), std::domain_error);
  // finite at the positivity floor, not clamped
  CHECK(std::isfinite(p1.b(1e-13)));
}

TEST_CASE("derivative structure: lambda' = a and b'' = a/r") {
  const auto p1 = Nonlinearity::power(1.0);
  const auto p2 = Nonlinearity::power(2.0);
  const auto p05 = Nonlinearity::power(0.5);
  const auto c2 = Nonlinearity::constant(2.0);
  const auto tab = tabulated_from_power(1.0);

  for (const Nonlinearity* nl : {&p1, &p2, &p05, &c2}) {
    for (double r : log_grid(0.01, 1e6, 40)) {
      const double h = 1e-3 * (1.0 + r);
      const double fd = oracles::fd1([&](double x) { return nl->lambda(x); }, r, h);
      CHECK(fd == doctest::Approx(nl->a(r)).epsilon(1e-6));
    }
  }
  // quadrature-backed law on a narrower range (quadrature noise in the stencil)
  for (double r : log_grid(0.01, 1e3, 25)) {
    const double h = 1e-3 * (1.0 + r);
    const double fd = oracles::fd1([&](double x) { return tab.lambda(x); }, r, h);
    CHECK(fd == doctest::Approx(tab.a(r)).epsilon(1e-6));
  }

  for (const Nonlinearity* nl : {&p1, &p2, &p05, &c2, &tab}) {
    for (double r : log_grid(0.02, 100.0, 30)) {
      const double h = 0.004 * r;
      const double fd = oracles::fd2([&](double x) { return nl->b(x); }, r, h);
      CHECK(fd == doctest::Approx(nl->a(r) / r).epsilon(1e-5));
    }
  }
  // b'(1) = 0
  for (const Nonlinearity* nl : {&p1, &p2, &c2}) {
    const double bp = oracles::fd1([&](double x) { return nl->b(x); }, 1.0, 1e-5);
    CHECK(std::abs(bp) <= 1e-9);
  }
}

TEST_CASE("closed forms agree with the quadrature route on [0.01, 1e6]") {
  for (double p : {0.5, 1.0, 1.3, 2.0}) {
    const auto nl = Nonlinearity::power(p);
    for (double r : log_grid(0.01, 1e6, 60)) {
      const double closed = nl.lambda(r);
      const double quad = nl.lambda_quadrature(r, 1e-10);
      CHECK(std::abs(quad - closed) <= 1e-9 * (1.0 + std::abs(closed)));
    }
  }
}

TEST_CASE("assumption report across the power family") {
  // divergence of int a is plausible exactly for p <= 1
  for (double p : {0.5, 0.9, 1.0, 1.1, 2.0}) {
    const auto rep = Nonlinearity::power(p).check_assumptions();
    CHECK(rep.divergence_plausible == (p <= 1.0));
  }
  {
    const auto rep = Nonlinearity::power(1.0).check_assumptions();
    CHECK(rep.alpha_estimate == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.alpha_bounded);
  }
  {
    const auto rep = Nonlinearity::power(2.0).check_assumptions();
    CHECK(rep.alpha_bounded);
    // Lambda(1e12) ~ int_1^inf (1+s)^-2 = 1/2
    CHECK(rep.lambda_at_probe == doctest::Approx(0.5).epsilon(1e-6));
  }
  {
    // s * a(s) = s grows linearly: A1 must be flagged
    const auto rep = Nonlinearity::constant(1.0).check_assumptions();
    CHECK_FALSE(rep.alpha_bounded);
    CHECK(rep.sa_tail_slope == doctest::Approx(1.0).epsilon(1e-6));
  }
  {
    // subcritical p < 1 also fails A1 (s a(s) ~ s^{1-p})
    const auto rep = Nonlinearity::power(0.5).check_assumptions();
    CHECK_FALSE(rep.alpha_bounded);
  }
  {
    const auto rep = tabulated_from_power(1.0).check_assumptions();
    CHECK(rep.continuity_ok);
    CHECK(rep.divergence_plausible);
  }
}

TEST_CASE("exact alpha where the sup has a closed form") {
  CHECK(Nonlinearity::power(1.0).alpha_exact().value() == 1.0);
  // p = 2: sup s/(1+s)^2 at s = 1 is 1/4
  CHECK(Nonlinearity::power(2.0).alpha_exact().value() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_FALSE(Nonlinearity::power(0.5).alpha_exact().has_value());
  CHECK_FALSE(Nonlinearity::constant(1.0).alpha_exact().has_value());
}

TEST_CASE("construction rejects malformed laws") {
  CHECK_THROWS_AS(Nonlinearity::power(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(Nonlinearity::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Nonlinearity::constant(-2.0), std::invalid_argument);
  CHECK_THROWS_AS(Nonlinearity::tabulated({1.0, 0.5}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Nonlinearity::tabulated({0.0, 1.0}, {1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Nonlinearity::tabulated({0.0}, {1.0}), std::invalid_argument);
}
