#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "bsdelab/rng.hpp"
#include "bsdelab/test_functions.hpp"

using namespace bsdelab;

TEST_CASE("psi point values") {
  for (double lam : {0.0, 0.3, 0.5, 1.0}) {
    CHECK(psi_eval(0.0, 2.0, lam) == 0.0);
    CHECK(psi_eval(3.5, 0.0, lam) == doctest::Approx(3.5));
  }
  CHECK(psi_eval(1.0, 2.0, 0.5) == doctest::Approx(4.0));
  // x exp(mu sqrt(2 ln(1 + x)))
  CHECK(psi_sqrt2(3.0, 0.7) == doctest::Approx(3.0 * std::exp(0.7 * std::sqrt(2.0 * std::log(4.0)))));
  CHECK(psi_eval(2.0, 1.5, 1.0) == doctest::Approx(2.0 * std::exp(1.5 * std::pow(std::log(3.0), 2.0))));
  CHECK(log_psi(2.0, 1.5, 0.25) == doctest::Approx(std::log(psi_eval(2.0, 1.5, 0.25))));
  CHECK_THROWS(psi_eval(-1.0, 1.0, 0.5));
  CHECK_THROWS(psi_eval(1.0, -1.0, 0.5));
}

TEST_CASE("psi increasing in x and mu") {
  CounterStream s(3, 0);
  for (int i = 0; i < 20000; ++i) {
    double lam = 1.5 * s.uniform(), mu = 3.0 * s.uniform();
    double a = std::exp(-8 + 14 * s.uniform()), b = std::exp(-8 + 14 * s.uniform());
    if (a > b) std::swap(a, b);
    if (a == b) continue;
    REQUIRE(psi_eval(a, mu, lam) > 0.0);
    REQUIRE(log_psi(a, mu, lam) < log_psi(b, mu, lam));
    REQUIRE(log_psi(a, mu, lam) <= log_psi(a, mu + 0.1, lam));
  }
}

TEST_CASE("growth sandwich") {
  for (double lam : {0.25, 0.5, 1.0}) {
    auto r = psi_growth_sandwich_check(lam, 1.0, 2.0, 0.5, 10000);
    CAPTURE(lam);
    CHECK(r.confirmed());
    for (const auto& it : r.items) {
      CAPTURE(it.name);
      CHECK(it.violations_above == 0);
    }
  }
  auto r = psi_growth_sandwich_check(0.25, 1.0, 2.0, 0.5, 10000);
  REQUIRE(!r.items.empty());
  // psi(x, 1; 1/4) < x^2 beyond the crossover: check the crossover is a sign change
  const auto& it = r.items.front();
  CHECK(it.located);
}

TEST_CASE("convexity-type suite has no violations") {
  for (double mu : {0.1, 1.0, 5.0}) {
    auto r = psi_lemma26_suite(mu, 20000, 17);
    CAPTURE(mu);
    CHECK(r.violations() == 0);
  }
  // instance of submultiplicativity
  CHECK(psi_sqrt2(6.0, 1.0) <= psi_sqrt2(2.0, 1.0) * psi_sqrt2(3.0, 1.0));
}

TEST_CASE("exponential moment of a stochastic integral") {
  auto z = exp_moment_bound_check(0.0, 0.5, 1.0, 1000, 1);
  CHECK(z.estimate == doctest::Approx(1.0));
  CHECK(z.bound == doctest::Approx(1.0));
  auto r = exp_moment_bound_check(1.0, 0.5, 1.0, 200000, 5);
  CHECK(r.bound == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::fabs(r.estimate - r.bound) <= 3.0 * r.se);
  CHECK_THROWS(exp_moment_bound_check(2.0, 0.5, 1.0, 100, 1));
}

TEST_CASE("square-root log bound used in the first regime") {
  CounterStream s(9, 0);
  for (int i = 0; i < 100000; ++i) {
    double x = std::exp(-5 + 20 * s.uniform());
    double lhs = x > 1.0 ? x * std::sqrt(std::log(x)) : 0.0;
    double rhs = (x + M_E) * std::sqrt(2.0 * std::log(x + M_E)) / std::sqrt(2.0);
    REQUIRE(lhs <= rhs);
  }
}
