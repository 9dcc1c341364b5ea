#include <cmath>

#include "doctest.h"

#include "bsdelab/threshold_odes.hpp"

using namespace bsdelab;

TEST_CASE("closed-form curves") {
  auto a = solve_mu(0.0, 1.0, 0.0, 0.0, 1.0);
  auto b = solve_mu(2.0, 0.0, 0.0, 0.0, 1.0);
  for (int i = 1; i <= 100; ++i) {
    double s = i / 100.0;
    CHECK(a.mu(s) == doctest::Approx(std::sqrt(s)).epsilon(1e-6));
    CHECK(b.mu(s) == doctest::Approx(std::sqrt(2.0) * s).epsilon(1e-6));
  }
  CHECK(a.mu(0.25) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(mu_terminal(0.0, 1.0, 0.25, 0.0, 1.0) == doctest::Approx(1.0 / std::sqrt(0.75)).epsilon(1e-6));
  CHECK(critical_threshold(0.0, 2.0, 0.0, Regime::LambdaZero, 1.0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(critical_threshold(0.0, 1.0, 0.25, Regime::LambdaSmall, 1.0) ==
        doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-6));
}

TEST_CASE("closed_form_mu") {
  CHECK(*closed_form_mu(4.0, 0.0, 1.0, 0.0, Regime::LambdaZero) == doctest::Approx(2.0));
  CHECK(*closed_form_mu(1.0, 2.0, 0.0, 0.0, Regime::LambdaZero) == doctest::Approx(std::sqrt(2.0)));
  CHECK_FALSE(closed_form_mu(1.0, 1.0, 1.0, 0.0, Regime::LambdaZero).has_value());
  CHECK(*closed_form_mu(1.0, 0.0, 1.0, 0.25, Regime::LambdaSmall) ==
        doctest::Approx(1.0 / std::sqrt(0.75)));
}

TEST_CASE("general curve against an independent integrator") {
  // DOP853 at rtol 1e-13 on mu' = mu + 0.55 / mu + 0.55 + 1, mu(0) = 0.1
  CHECK(mu_terminal(1.0, 1.0, 0.5, 0.1, 1.0) == doctest::Approx(4.077896851985917).epsilon(1e-7));
}

TEST_CASE("nu closed form and initial values") {
  auto c = solve_curve(0.0, 1.0, 0.0, 0.0, 1.0);
  REQUIRE(c.has_nu);
  for (double s : {0.01, 0.1, 0.5, 1.0})
    CHECK(c.nu(s) == doctest::Approx(s / 2.0 + std::sqrt(2.0 * s)).epsilon(1e-6));
  CHECK(c.nu_values.front() == 0.0);
  auto h = solve_curve(1.0, 1.0, 0.5, 0.5, 1.0);
  CHECK(h.nu_values.front() == 1.0);
  CHECK(h.mu_values.front() == 0.5);
  auto s = solve_curve(1.0, 1.0, 0.3, 0.5, 1.0);
  CHECK(s.nu_values.front() == 0.0);
  auto l = solve_curve(1.0, 1.0, 1.0, 0.5, 1.0);
  CHECK(l.nu_values.front() == 0.0);
}

TEST_CASE("curve invariants across regimes") {
  struct P {
    double b, g, l, e;
  };
  for (P p : {P{1, 1, 0, 0}, P{1, 0, 0, 0}, P{1, 1, 0.3, 0.2}, P{0, 1, 0.25, 0},
              P{1, 1, 0.5, 0.5}, P{2, 0.5, 0.5, 0.25}, P{1, 1, 1, 0.5}, P{0.2, 0.5, 1, 0.1}}) {
    CAPTURE(p.l);
    auto c = solve_curve(p.b, p.g, p.l, p.e, 1.0);
    for (std::size_t i = 1; i < c.mu_values.size(); ++i) REQUIRE(c.mu_values[i] > c.mu_values[i - 1]);
    CHECK(c.mu_values.front() == p.e);
    CHECK(ode_midpoint_residual(c) <= 1e-8);
    double fine = mu_terminal(p.b, p.g, p.l, p.e, 1.0, 20000);
    CHECK(std::fabs(fine - c.mu_T()) <= 1e-7 * c.mu_T());
    CHECK(c.has_nu == (p.l == 0.0 || p.e > 0.0));
    if (!c.has_nu) continue;
    double nfine = solve_curve(p.b, p.g, p.l, p.e, 1.0, 20000).nu_T();
    CHECK(std::fabs(nfine - c.nu_T()) <= 1e-6 * std::fabs(c.nu_T()));
  }
}

TEST_CASE("epsilon monotonicity and limit") {
  auto lo = solve_mu(1.0, 1.0, 0.3, 0.05, 1.0), hi = solve_mu(1.0, 1.0, 0.3, 0.1, 1.0);
  for (std::size_t i = 0; i < lo.mu_values.size(); i += 97) CHECK(lo.mu_values[i] <= hi.mu_values[i]);
  double m1 = mu_terminal(1, 1, 0.3, 0.1, 1), m2 = mu_terminal(1, 1, 0.3, 0.01, 1),
         m3 = mu_terminal(1, 1, 0.3, 0.001, 1);
  double m0 = critical_threshold(1, 1, 0.3, Regime::LambdaSmall, 1);
  CHECK(m1 > m2);
  CHECK(m2 > m3);
  CHECK(m3 > m0);
  CHECK((m2 - m3) * 2.0 <= (m1 - m2));
  CHECK(std::fabs(mu_terminal(1, 1, 0.3, 1e-6, 1) - m0) <= 1e-4);
}

TEST_CASE("invert_eps") {
  for (double lam : {0.3, 0.5, 1.0}) {
    Regime r = regime_for_lambda(lam);
    double target = mu_terminal(1.0, 1.0, lam, 0.3, 1.0);
    CHECK(invert_eps(1.0, 1.0, lam, r, target, 1.0) == doctest::Approx(0.3).epsilon(1e-6));
    double crit = critical_threshold(1.0, 1.0, lam, r, 1.0);
    CHECK_THROWS(invert_eps(1.0, 1.0, lam, r, 0.99 * crit, 1.0));
    double e1 = invert_eps(1.0, 1.0, lam, r, crit * 1.1, 1.0);
    double e2 = invert_eps(1.0, 1.0, lam, r, crit * 1.2, 1.0);
    CHECK(e1 < e2);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS(solve_mu(1.0, 0.0, 0.3, 0.1, 1.0));
  CHECK_THROWS(solve_mu(0.0, 0.0, 0.0, 0.0, 1.0));
}

TEST_CASE("unified form consistency is reported") {
  for (double lam : {0.0, 0.3, 0.5, 1.0}) {
    auto u = unified_consistency(1.0, 1.0, lam, lam == 0.0 ? 0.0 : 0.3, 1.0);
    CAPTURE(lam);
    CAPTURE(u.relative_gap);
    CHECK(std::isfinite(u.unified_mu_T));
    CHECK(u.consistent == (u.relative_gap <= 1e-6));
  }
}
