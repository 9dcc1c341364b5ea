#include <cmath>

#include "doctest.h"

#include "bsdelab/rng.hpp"
#include "bsdelab/test_functions.hpp"
#include "bsdelab/threshold_odes.hpp"

using namespace bsdelab;

namespace {

struct Case {
  double beta, gamma, lambda, eps;
};

const Case kCases[] = {{1, 1, 0, 0}, {1, 1, 0.3, 0.5}, {1, 1, 0.5, 0.5}, {1, 1, 1, 0.5}};

}  // namespace

TEST_CASE("phi at s = 0") {
  auto z = make_test_function(0.0, 1.0, 0.0, 0.0, 1.0);
  for (double x : {0.0, 0.5, 7.0}) CHECK(phi_eval(z, 0.0, x) == doctest::Approx(x + M_E));
  auto h = make_test_function(1.0, 1.0, 0.5, 0.3, 1.0);
  for (double x : {0.0, 0.5, 7.0})
    CHECK(phi_eval(h, 0.0, x) == doctest::Approx(std::pow(1.0 + x, 1.3)).epsilon(1e-12));
}

TEST_CASE("phi against a direct evaluation of the regime formulas") {
  const double e = M_E;
  {
    auto tf = make_test_function(1.0, 1.0, 0.3, 0.5, 1.0);
    const auto& c = *tf.curve;
    double ep = 0.5;
    double k = std::exp((1 + ep) / (2 * ep)) + std::pow(1 / (2 * ep * ep), 1 / (2 * ep)) +
               c.mu_T() / 1.0 + e;
    CHECK(tf.offset == doctest::Approx(k).epsilon(1e-14));
    for (double s : {0.0, 0.13, 0.5, 1.0})
      for (double x : {0.0, 0.7, 12.0, 300.0}) {
        double ref = (x + k) * std::exp(c.mu(s) * std::pow(std::log(x + k), 0.8) + c.nu(s));
        CHECK(phi_eval(tf, s, x) == doctest::Approx(ref).epsilon(1e-12));
      }
  }
  {
    auto tf = make_test_function(1.0, 1.0, 1.0, 0.5, 1.0);
    const auto& c = *tf.curve;
    double q = 2.0 * c.mu_T();
    double k = e + q * q;
    CHECK(tf.offset == doctest::Approx(k).epsilon(1e-14));
    for (double s : {0.0, 0.4, 1.0})
      for (double x : {0.0, 3.0, 50.0}) {
        double ref = (x + k) * std::exp(c.mu(s) * std::pow(std::log(x + k), 2.0) + c.nu(s));
        CHECK(phi_eval(tf, s, x) == doctest::Approx(ref).epsilon(1e-12));
      }
  }
  {
    auto tf = make_test_function(1.0, 2.0, 0.0, 0.0, 1.0);
    const auto& c = *tf.curve;
    for (double s : {0.1, 1.0})
      for (double x : {0.0, 3.0}) {
        double ref = (x + e) * std::exp(c.mu(s) * std::sqrt(2 * std::log(x + e)) + c.nu(s));
        CHECK(phi_eval(tf, s, x) == doctest::Approx(ref).epsilon(1e-12));
      }
  }
}

TEST_CASE("phi domain errors") {
  auto tf = make_test_function(1.0, 1.0, 0.3, 0.5, 1.0);
  CHECK_THROWS(phi_eval(tf, -0.1, 1.0));
  CHECK_THROWS(phi_eval(tf, 1.5, 1.0));
  CHECK_THROWS(phi_eval(tf, 0.5, -1.0));
}

TEST_CASE("derivatives against central differences") {
  CounterStream rs(4, 0);
  for (const auto& p : kCases) {
    auto tf = make_test_function(p.beta, p.gamma, p.lambda, p.eps, 1.0);
    CAPTURE(p.lambda);
    auto check_at = [&](double s, double x) {
      const double h = 1e-5;
      auto d = phi_derivatives(tf, s, x);
      double phi = phi_eval(tf, s, x);
      double hs = h * std::max(1.0, s), hx = h * std::max(1.0, x);
      // log domain keeps the differences well conditioned when phi is huge
      double ls = (phi_log(tf, s + hs, x) - phi_log(tf, s - hs, x)) / (2 * hs);
      double lx = (phi_log(tf, s, x + hx) - phi_log(tf, s, x - hx)) / (2 * hx);
      double fxx = (phi_derivatives(tf, s, x + hx).d_x - phi_derivatives(tf, s, x - hx).d_x) / (2 * hx);
      CHECK(std::fabs(d.d_s / phi - ls) <= 1e-6 * (1.0 + std::fabs(ls)));
      CHECK(std::fabs(d.d_x / phi - lx) <= 1e-6 * (1.0 + std::fabs(lx)));
      CHECK(d.d_xx == doctest::Approx(fxx).epsilon(1e-6));
      CHECK(d.d_x > 0.0);
      CHECK(d.d_xx > tf.shift);
    };
    check_at(0.5, 1.0);
    for (int i = 0; i < 30; ++i) check_at(0.05 + 0.9 * rs.uniform(), 0.1 + 20.0 * rs.uniform());
  }
}

TEST_CASE("power-form derivative") {
  auto tf = make_test_function(1.0, 1.0, 0.5, 0.5, 1.0);
  for (double x : {0.0, 2.0, 40.0}) {
    double s = 0.6, m = tf.curve->mu(s);
    CHECK(phi_derivatives(tf, s, x).d_x ==
          doctest::Approx(phi_eval(tf, s, x) * (1 + m) / (1 + x)).epsilon(1e-12));
  }
}

TEST_CASE("residual at the origin equals the time derivative") {
  for (const auto& p : kCases) {
    auto tf = make_test_function(p.beta, p.gamma, p.lambda, p.eps, 1.0);
    double r = hjb_residual(tf, 0.5, 0.0, 0.0);
    CHECK(r == doctest::Approx(phi_derivatives(tf, 0.5, 0.0).d_s).epsilon(1e-12));
    CHECK(r > 0.0);
  }
}

TEST_CASE("residual grid, coarse") {
  for (const auto& p : kCases) {
    auto tf = make_test_function(p.beta, p.gamma, p.lambda, p.eps, 1.0);
    auto r = verify_residual_grid(tf, 8, 40, 40);
    CAPTURE(p.lambda);
    CHECK(r.pass());
    CHECK(r.points > 0);
  }
}

TEST_CASE("sandwich constants") {
  auto tf = make_test_function(1.0, 1.0, 0.0, 0.0, 1.0);
  auto sc = psi_phi_sandwich(tf);
  CHECK_FALSE(sc.power_form);
  CHECK(sc.lower_violations == 0);
  CHECK(sc.K >= std::exp(tf.curve->nu_T()) * (1 - 1e-12));
  auto fine = psi_phi_sandwich(tf, 120, 800);
  CHECK(fine.K == doctest::Approx(sc.K).epsilon(0.01));
  for (const auto& p : kCases) {
    auto t = make_test_function(p.beta, p.gamma, p.lambda, p.eps, 1.0);
    auto s = psi_phi_sandwich(t);
    CAPTURE(p.lambda);
    CHECK(s.lower_violations == 0);
    CHECK(std::isfinite(s.K));
    CHECK(s.K > 0.0);
    CHECK(s.power_form == (p.lambda == 0.5));
  }
}

TEST_CASE("delta_shift") {
  double a = delta_shift(1.0, 0.1, M_E + 1.0);
  CHECK(a > 0.0);
  CHECK(delta_shift(1.0, 0.2, M_E + 1.0) >= a);
  CHECK_THROWS(delta_shift(0.5, 0.1, 3.0));
  CHECK_THROWS(delta_shift(1.0, 0.0, 3.0));
}
