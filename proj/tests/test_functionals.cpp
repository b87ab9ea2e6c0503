#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ks1d/functionals.hpp"
#include "ks1d/spatial.hpp"
#include "support/oracles.hpp"

using namespace ks1d;

namespace {

State make_state(const Grid& g, double uval, double vval) {
  State s(g, 0.0);
  std::fill(s.u.begin(), s.u.end(), uval);
  std::fill(s.v.begin(), s.v.end(), vval);
  return s;
}

State random_state(const Grid& g, unsigned seed) {
  State s(g, 0.0);
  s.u = oracles::random_positive_field(g.size(), seed, 0.3, 5.0);
  s.v = oracles::random_positive_field(g.size(), seed + 1000u, 0.0, 3.0);
  return s;
}

}  // namespace

TEST_CASE("mass") {
  Grid g(10);
  CHECK(mass(g, make_state(g, 7.0, 0.0)) == doctest::Approx(7.0).epsilon(1e-14));

  // cosine bump integrates to its mass parameter on the cell-centered grid
  for (int n : {8, 27, 64}) {
    Grid gg(n);
    State s(gg, 0.0);
    for (int i = 0; i < n; ++i)
      s.u[static_cast<std::size_t>(i)] = 4.0 * (1.0 + std::cos(2.0 * 3.141592653589793 * gg.center(i)));
    CHECK(mass(gg, s) == doctest::Approx(4.0).epsilon(1e-13));
  }

  Grid g4(4);
  State s(g4, 0.0);
  s.u = {2.0, 4.0, 2.0, 4.0};
  CHECK(mass(g4, s) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("free energy L on constant states") {
  Grid g(12);
  const auto p1 = Nonlinearity::power(1.0);
  CHECK(lyapunov_L(g, make_state(g, 1.0, 0.0), p1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(lyapunov_L(g, make_state(g, 1.0, 1.0), p1) == doctest::Approx(-0.5).epsilon(1e-14));
  // u = 3, v = 0: only the entropy part contributes, b(3) = 3 ln 3 - 4 ln 2
  CHECK(lyapunov_L(g, make_state(g, 3.0, 0.0), p1) ==
        doctest::Approx(0.5232481437645480).epsilon(1e-13));
}

TEST_CASE("lyapunov dissipation") {
  const auto p1 = Nonlinearity::power(1.0);
  const auto c1 = Nonlinearity::constant(1.0);
  Grid g(16);
  {
    // steady pair: both parts vanish
    auto [d1, d2] = lyapunov_dissipation(g, make_state(g, 2.0, 2.0), p1);
    CHECK(d1 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(d2 == doctest::Approx(0.0).epsilon(1e-14));
  }
  {
    // u = 1, v = 0: dt v = u, no gradients
    auto [d1, d2] = lyapunov_dissipation(g, make_state(g, 1.0, 0.0), c1);
    CHECK(d1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d2 == doctest::Approx(0.0).epsilon(1e-14));
  }
  {
    // smooth bump: refinement-consistent against a fine-grid evaluation
    auto eval = [&](int n) {
      Grid gg(n);
      State s(gg, 0.0);
      for (int i = 0; i < n; ++i) {
        const double x = gg.center(i);
        s.u[static_cast<std::size_t>(i)] = 2.0 + std::cos(2.0 * 3.141592653589793 * x);
        s.v[static_cast<std::size_t>(i)] = 1.0 + 0.5 * std::cos(3.141592653589793 * x);
      }
      return lyapunov_dissipation(gg, s, p1).second;
    };
    const double d64 = eval(64), d256 = eval(256), d1024 = eval(1024);
    // second-order convergence toward a grid limit: 4x refinement shrinks the
    // distance to the finest evaluation by ~16
    CHECK(std::abs(d256 - d1024) < 0.15 * std::abs(d64 - d1024));
    CHECK(std::abs(d64 - d1024) < 5e-2 * std::abs(d1024));
  }
}

TEST_CASE("second energy F") {
  const auto p1 = Nonlinearity::power(1.0);
  Grid g(20);
  {
    const auto fe = functional_F(g, make_state(g, 1.0, 0.0), p1);
    CHECK(fe.F == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(fe.grad_term == 0.0);
    CHECK(fe.uLambda_term == doctest::Approx(0.0).epsilon(1e-14));
  }
  {
    // constant state: F = -c Lambda(c); at c = 3, p = 1: -3 ln 2
    const auto fe = functional_F(g, make_state(g, 3.0, 0.0), p1);
    CHECK(fe.F == doctest::Approx(-3.0 * std::log(2.0)).epsilon(1e-14));
  }
  {
    // definition-level identity F = grad/2 - uLambda on random states
    for (unsigned seed : {1u, 2u, 3u, 4u}) {
      const State s = random_state(g, seed);
      const auto fe = functional_F(g, s, p1);
      CHECK(fe.F == doctest::Approx(0.5 * fe.grad_term - fe.uLambda_term).epsilon(1e-14));
    }
  }
}

TEST_CASE("dissipation D on constant states") {
  Grid g(16);
  const auto p1 = Nonlinearity::power(1.0);
  // steady pair (M, M): w = M/2 everywhere, D = M a(M) M^2/4
  CHECK(dissipation_D(g, make_state(g, 1.0, 1.0), p1) == doctest::Approx(0.125).epsilon(1e-14));
  const double m = 2.5;
  CHECK(dissipation_D(g, make_state(g, m, m), p1) ==
        doctest::Approx(m * (1.0 / (1.0 + m)) * m * m / 4.0).epsilon(1e-14));
  // u = 1, v = 1 with dt v = 0: D = a(1)/4
  const auto c1 = Nonlinearity::constant(1.0);
  CHECK(dissipation_D(g, make_state(g, 1.0, 1.0), c1) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("identity residual: steady exactness and contract checks") {
  Grid g(16);
  const auto p1 = Nonlinearity::power(1.0);
  for (Variant variant : {Variant::ParabolicParabolic, Variant::ParabolicElliptic}) {
    State a = make_state(g, 1.0, 1.0);
    State b = make_state(g, 1.0, 1.0);
    b.t = 0.01;
    CHECK(std::abs(identity_residual(g, a, b, p1, variant)) <= 1e-12);
    CHECK(std::abs(identity_residual(g, a, b, p1, variant, ResidualMode::Centered)) <= 1e-12);
  }
  {
    State a = make_state(g, 1.0, 1.0);
    State b = make_state(g, 1.0, 1.0);
    CHECK_THROWS_AS((void)identity_residual(g, a, b, p1, Variant::ParabolicParabolic),
                    std::invalid_argument);  // dt = 0
    Grid g2(8);
    State c = make_state(g2, 1.0, 1.0);
    c.t = 0.01;
    CHECK_THROWS_AS((void)identity_residual(g, a, c, p1, Variant::ParabolicParabolic),
                    std::invalid_argument);  // mismatched grids
  }
}

TEST_CASE("cross-term identity holds to roundoff") {
  Grid g(64);
  const auto p1 = Nonlinearity::power(1.0);
  {
    const auto ct = cross_term_residual(g, make_state(g, 2.0, 2.0), p1);
    CHECK(ct.residual <= 1e-13);
  }
  for (unsigned seed : {5u, 6u, 7u}) {
    State s = random_state(g, seed);
    const auto ct = cross_term_residual(g, s, p1, Variant::ParabolicParabolic);
    CHECK(ct.residual <= 1e-11 * ct.scale);
  }
  {
    // parabolic-elliptic: v from the quasi-static solve, dt v term dropped
    HelmholtzSolver hs(g);
    State s = random_state(g, 9u);
    hs.solve(s.u, s.v);
    const auto ct = cross_term_residual(g, s, p1, Variant::ParabolicElliptic);
    CHECK(ct.residual <= 1e-11 * ct.scale);
  }
}

TEST_CASE("inequality monitors") {
  const auto p1 = Nonlinearity::power(1.0);
  Grid g(25);
  {
    // u = 1: Lambda = 0 throughout, boundary case
    const auto iq = inequality_monitors(g, make_state(g, 1.0, 0.0), p1, 1.0);
    CHECK(iq.r31 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(iq.sobolev_slack == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(iq.lambda_L1 == doctest::Approx(0.0).epsilon(1e-14));
  }
  {
    // u = 3, M = 3: |Lambda|^2 = ln^2 2 per cell, r31 = ln^2 2 / 4
    const auto iq = inequality_monitors(g, make_state(g, 3.0, 0.0), p1, 3.0);
    CHECK(iq.lambda_L2_sq == doctest::Approx(0.4804530139182014).epsilon(1e-13));
    CHECK(iq.r31 == doctest::Approx(0.1201132534795503).epsilon(1e-13));
    CHECK(iq.lambda_W11 == doctest::Approx(std::log(2.0)).epsilon(1e-13));
    CHECK(iq.sup_abs_lambda == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  }
  {
    // sobolev slack is nonnegative on arbitrary positive states
    for (unsigned seed = 30; seed < 40; ++seed) {
      const State s = random_state(g, seed);
      const auto iq = inequality_monitors(g, s, p1, mass(g, s));
      CHECK(iq.sobolev_slack >= 0.0);
      // pointwise Lambda bound with alpha = 1 has nonnegative slack
      CHECK(iq.prop31_pointwise_slack >= 0.0);
    }
  }
}

TEST_CASE("weighted dissipation accumulator") {
  {
    WeightedDissipationAccumulator acc;
    for (int k = 0; k <= 10; ++k) acc.add(0.1 * k, 0.0);
    CHECK(acc.value() == 0.0);
    CHECK(acc.supremum() == 0.0);
  }
  {
    // constant integrand converges to the integrand value
    WeightedDissipationAccumulator acc;
    const double gval = 3.7;
    for (int k = 0; k <= 4000; ++k) acc.add(0.005 * k, gval);
    CHECK(acc.value() == doctest::Approx(gval).epsilon(1e-4));
  }
  {
    // single update: hand evaluation of the trapezoid rule with decay
    WeightedDissipationAccumulator acc;
    acc.add(0.0, 2.0);
    acc.add(0.7, 2.0);
    const double expect = 0.5 * 0.7 * (std::exp(-0.7) * 2.0 + 2.0);
    CHECK(acc.value() == doctest::Approx(expect).epsilon(1e-14));
    // close to the exponential mean g (1 - e^{-t}) up to trapezoid error
    CHECK(acc.value() == doctest::Approx(2.0 * (1.0 - std::exp(-0.7))).epsilon(0.05));
  }
  {
    WeightedDissipationAccumulator acc;
    acc.add(0.0, 1.0);
    CHECK_THROWS_AS(acc.add(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(acc.add(-1.0, 1.0), std::invalid_argument);
    WeightedDissipationAccumulator acc2;
    CHECK_THROWS_AS(acc2.add(0.0, -1.0), std::invalid_argument);
  }
}
