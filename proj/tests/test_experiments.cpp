#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "bsdelab/experiments.hpp"
#include "bsdelab/regime.hpp"

using namespace bsdelab;

namespace {

SimConfig sim(int steps, std::size_t paths, std::uint64_t seed = 7) {
  SimConfig c;
  c.steps = steps;
  c.paths = paths;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("generator and terminal from config") {
  auto cfg = Config::parse("[generator]\nname = linear\na = 0.5\nc = 1\n"
                           "[g2]\nname = ex4.8\nbeta = 1\ngamma = 1\nlambda = 0.3\nk = 1\nadd = 2\n"
                           "[terminal]\nkind = linear\nc = 2\nshift = -1\n");
  std::vector<double> b{0.3}, z{0.0};
  auto g = generator_from_config(cfg);
  CHECK(g(0.0, b, 2.0, z) == doctest::Approx(2.0));
  auto g2 = generator_from_config(cfg, "g2");
  auto ref = builtin_example("ex4.8", {1, 1, 0.3, 1}).g;
  CHECK(g2(0.1, b, 0.4, z) == doctest::Approx(ref(0.1, b, 0.4, z) + 2.0));
  auto xi = terminal_from_config(cfg);
  CHECK(xi(b) == doctest::Approx(-0.4));

  CHECK(generator_from_config(Config::parse("")).yz_free);
  CHECK_THROWS(terminal_from_config(Config::parse("[terminal]\nkind = cubic\n")));
  CHECK_THROWS(generator_from_config(Config::parse("[generator]\nname = nope\n")));
}

TEST_CASE("sim config ingestion validates") {
  auto s = sim_from_config(Config::parse("[sim]\nsteps = 8\npaths = 256\nbasis_degree = 3\n"), 11);
  CHECK(s.steps == 8);
  CHECK(s.paths == 256);
  CHECK(s.basis_degree == 3);
  CHECK(s.seed == 11);
  CHECK_THROWS(sim_from_config(Config::parse("[sim]\nd = 5\n"), 1));
}

TEST_CASE("default eps per regime") {
  CHECK(default_eps(Regime::LambdaZero, 1.0) == 0.0);
  CHECK(default_eps(Regime::LambdaSmall, 1.0) == 0.5);
  CHECK(default_eps(Regime::LambdaHalf, 0.8) == doctest::Approx(0.4));
  CHECK(default_eps(Regime::LambdaLarge, 1.0) == 0.5);
}

TEST_CASE("comparison: terminal shift with a (y,z)-free generator") {
  ComparisonSetup s;
  s.g = s.g2 = abs_b_generator();
  s.xi = linear_terminal(1.0, -1.0);
  s.xi2 = linear_terminal(1.0);
  s.sim = sim(32, 1u << 13);
  auto rep = run_comparison(s);
  CHECK(rep.pass);
  CHECK(rep.terminal_ordered);
  CHECK(rep.generator_ordered);
  CHECK(rep.certificate == "UN1+UN2");
  CHECK(rep.y0_prime - rep.y0 == doctest::Approx(1.0).epsilon(1e-9));
  // every path sits exactly one below
  CHECK(rep.worst_violation <= 0.0);

  auto ens = simulate_brownian(s.sim);
  auto a = solve_bsde(s.g, s.xi, ens, s.sim), b = solve_bsde(s.g2, s.xi2, ens, s.sim);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.Y.size(); ++k) worst = std::max(worst, std::fabs(b.Y[k] - a.Y[k] - 1.0));
  CHECK(worst < 1e-9);
}

TEST_CASE("comparison: unit shift of the generator moves Y0 by T") {
  for (double T : {0.5, 1.0, 2.0}) {
    ComparisonSetup s;
    s.g = abs_b_generator();
    s.g2 = shifted_generator(s.g, 1.0);
    s.xi = s.xi2 = linear_terminal(1.0);
    s.sim = sim(32, 1u << 13);
    s.sim.T = T;
    auto rep = run_comparison(s);
    CHECK(rep.pass);
    CHECK(rep.y0_prime - rep.y0 == doctest::Approx(T).epsilon(1e-9));
  }
}

TEST_CASE("comparison: identical inputs give zero violation exactly") {
  ComparisonSetup s;
  s.g = s.g2 = builtin_example("ex6.7", {0.2, 0.5, 1.0, 1.0}).g;
  s.xi = s.xi2 = linear_terminal(1.0);
  s.sim = sim(16, 1u << 12);
  auto rep = run_comparison(s);
  CHECK(rep.pass);
  CHECK(rep.worst_violation == 0.0);
  CHECK(rep.y0 == rep.y0_prime);
}

TEST_CASE("comparison refuses to certify") {
  ComparisonSetup s;
  s.g = s.g2 = abs_b_generator();
  s.sim = sim(8, 1u << 10);
  s.xi = linear_terminal(1.0);
  s.xi2 = linear_terminal(1.0, -0.5);
  CHECK_THROWS_AS(run_comparison(s), CertificationError);

  s.xi2 = s.xi;
  s.g = shifted_generator(abs_b_generator(), 1.0);
  CHECK_THROWS_AS(run_comparison(s), CertificationError);

  // neither side convex nor carrying moduli
  s.g = s.g2 = builtin_example("ex4.8", {1, 1, 0.3, 1}).g;
  s.g.moduli.reset();
  s.g2.moduli.reset();
  CHECK_THROWS_AS(run_comparison(s), CertificationError);
}

TEST_CASE("threshold table rows") {
  ThresholdTableSetup s;
  s.cells = {{0, 1, 0}, {0, 1, 0.25}, {0, 1, 0.5}, {1, 1, 1}};
  s.xi = abs_terminal(1.0);
  s.sim = sim(16, 1u << 14);
  auto rows = run_threshold_table(s);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].regime == Regime::LambdaZero);
  CHECK(rows[0].mu_critical == doctest::Approx(1.0).epsilon(1e-6));
  REQUIRE(rows[0].closed_form);
  CHECK(*rows[0].closed_form == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rows[1].regime == Regime::LambdaSmall);
  CHECK(rows[1].mu_critical == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-6));
  CHECK(rows[2].regime == Regime::LambdaHalf);
  CHECK(rows[2].pass);
  CHECK(rows[2].mu_certificate == doctest::Approx(1.05 * rows[2].mu_critical));
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.estimate));
    CHECK(r.estimate >= 1.0);
  }

  // integrands at x = 0 are the regime's psi at the origin
  CHECK(regime_integrand(Regime::LambdaHalf, 0.5, 3.0, 0.0) == 1.0);
  CHECK(regime_integrand(Regime::LambdaHalf, 0.5, 1.0, 1.0) == doctest::Approx(4.0));
}

TEST_CASE("threshold table is reproducible") {
  ThresholdTableSetup s;
  s.cells = {{1, 1, 0.3}};
  s.sim = sim(8, 1u << 12);
  auto a = run_threshold_table(s), b = run_threshold_table(s);
  CHECK(a[0].estimate == b[0].estimate);
  CHECK(a[0].se == b[0].se);
}

TEST_CASE("apriori bound for the zero generator") {
  AprioriSetup s;
  s.g = zero_generator();
  s.xi = {"clip", [](StateSpan b) { return std::clamp(b[0], -1.0, 1.0); }};
  s.sim = sim(16, 1u << 12);
  s.bootstrap = 50;
  s.envelope_samples = 5000;
  auto rep = run_apriori_bound(s);
  CHECK(rep.regime == Regime::LambdaZero);
  CHECK(rep.eps == 0.0);
  CHECK(rep.pass);
  CHECK(rep.min_margin > 0.0);
  REQUIRE(rep.t.size() == 17);
  CHECK(rep.margin.size() == rep.t.size());
  CHECK(rep.se.size() == rep.t.size());
  // |Y| <= 1, so the left side never exceeds psi(1, mu(t))
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    CHECK(rep.lhs[i] <= psi_sqrt2(1.0, rep.mu_T) + 1e-12);
    CHECK(rep.margin[i] == doctest::Approx(rep.rhs[i] - rep.lhs[i]));
  }
  CHECK(rep.margin[rep.argmin] == rep.min_margin);

  auto again = run_apriori_bound(s);
  CHECK(again.margin == rep.margin);
  CHECK(again.se == rep.se);
}

TEST_CASE("apriori refuses a generator outside its envelope") {
  AprioriSetup s;
  s.g = quadratic_y_generator(1.0);
  s.xi = linear_terminal(1.0);
  s.sim = sim(8, 1u << 10);
  s.envelope_samples = 5000;
  CHECK_THROWS_AS(run_apriori_bound(s), CertificationError);
}

TEST_CASE("apriori margins are stable under doubling M") {
  AprioriSetup s;
  s.g = builtin_example("ex3.8-g2", {0.5, 0.5, 0.0, 0.5}).g;
  s.xi = linear_terminal(1.0);
  s.bootstrap = 60;
  s.envelope_samples = 5000;
  s.sim = sim(16, 1u << 12);
  auto a = run_apriori_bound(s);
  s.sim.paths = 1u << 13;
  auto b = run_apriori_bound(s);
  CHECK(a.pass);
  CHECK(b.pass);
  double se = std::hypot(a.min_margin_se, b.se[a.argmin]);
  CHECK(std::fabs(a.min_margin - b.margin[a.argmin]) <= 3.0 * se);
}
