#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bsdelab/numerics.hpp"
#include "bsdelab/rng.hpp"
#include "bsdelab/test_functions.hpp"

namespace bsdelab {

double log_psi(double x, double mu, double lambda) {
  if (x < 0.0 || mu < 0.0) throw std::domain_error("psi: negative input");
  if (x == 0.0) return -INFINITY;
  return std::log(x) + mu * std::pow(std::log1p(x), psi_exponent(lambda));
}

double psi_eval(double x, double mu, double lambda) {
  if (x < 0.0 || mu < 0.0) throw std::domain_error("psi: negative input");
  if (x == 0.0) return 0.0;
  return x * std::exp(mu * std::pow(std::log1p(x), psi_exponent(lambda)));
}

double log_psi_sqrt2(double x, double mu) {
  if (x < 0.0 || mu < 0.0) throw std::domain_error("psi: negative input");
  if (x == 0.0) return -INFINITY;
  return std::log(x) + mu * std::sqrt(2.0 * std::log1p(x));
}

double psi_sqrt2(double x, double mu) {
  if (x < 0.0 || mu < 0.0) throw std::domain_error("psi: negative input");
  if (x == 0.0) return 0.0;
  return x * std::exp(mu * std::sqrt(2.0 * std::log1p(x)));
}

bool GrowthSandwichReport::confirmed() const {
  for (const auto& it : items)
    if (!it.located || it.violations_above != 0) return false;
  return !items.empty();
}

namespace {

SandwichItem locate_and_sample(const std::string& name, const num::ScalarFn& h, double x_min,
                               double x_max, std::size_t samples, CounterStream& rs) {
  // h(x) > 0 means the strict inequality holds at x
  SandwichItem it;
  it.name = name;
  const int n = 4000;
  auto grid = num::logspace(x_min, x_max, n);
  int last_bad = -1;
  for (int i = 0; i < n; ++i)
    if (!(h(grid[i]) > 0.0)) last_bad = i;
  if (last_bad == n - 1) {
    it.located = false;
    it.crossover = x_max;
    return it;
  }
  it.located = true;
  if (last_bad < 0) {
    it.crossover = x_min;
  } else {
    double lo = std::log(grid[last_bad]), hi = std::log(grid[last_bad + 1]);
    double r = num::bisect([&](double u) { return h(std::exp(u)) > 0.0 ? 1.0 : -1.0; }, lo, hi,
                           1e-13);
    it.crossover = std::exp(hi) > std::exp(r) ? std::exp(r) * (1.0 + 1e-9) : std::exp(hi);
  }
  const double la = std::log(it.crossover), lb = std::log(x_max), l0 = std::log(x_min);
  for (std::size_t k = 0; k < samples; ++k) {
    double x = std::exp(la + (lb - la) * rs.uniform());
    ++it.checked;
    if (!(h(x) > 0.0)) ++it.violations_above;
    if (it.crossover > x_min) {
      double xb = std::exp(l0 + (la - l0) * rs.uniform());
      if (!(h(xb) > 0.0)) ++it.violations_below;
    }
  }
  return it;
}

}  // namespace

GrowthSandwichReport psi_growth_sandwich_check(double lambda, double mu, double p, double epsilon,
                                               std::size_t samples, std::uint64_t seed) {
  if (!(mu > 0.0)) throw std::domain_error("sandwich check: mu must be positive");
  GrowthSandwichReport rep;
  rep.lambda = lambda;
  rep.mu = mu;
  rep.p = p;
  rep.epsilon = epsilon;
  CounterStream rs(seed, 0x5A);
  const double a = psi_exponent(lambda);
  auto lp = [&](double x) { return mu * std::pow(std::log1p(x), a); };  // ln psi - ln x
  if (lambda < 0.5) {
    if (!(p > 1.0)) throw std::domain_error("sandwich check: p must exceed 1");
    rep.items.push_back(locate_and_sample(
        "x ln(1+x) < psi", [&](double x) { return lp(x) - std::log(std::log1p(x)); }, rep.x_min,
        rep.x_max, samples, rs));
    rep.items.push_back(locate_and_sample(
        "psi < x^p", [&](double x) { return (p - 1.0) * std::log(x) - lp(x); }, rep.x_min,
        rep.x_max, samples, rs));
  } else if (lambda == 0.5) {
    rep.items.push_back(locate_and_sample(
        "x^(1+mu) < psi", [&](double x) { return mu * (std::log1p(x) - std::log(x)); }, rep.x_min,
        rep.x_max, samples, rs));
    rep.items.push_back(locate_and_sample(
        "psi < (1+x)^(1+mu)", [&](double x) { return std::log1p(x) - std::log(x); }, rep.x_min,
        rep.x_max, samples, rs));
  } else {
    if (!(p > 1.0)) throw std::domain_error("sandwich check: p must exceed 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::domain_error("sandwich check: eps in (0,1)");
    rep.items.push_back(locate_and_sample(
        "x^p < psi", [&](double x) { return lp(x) - (p - 1.0) * std::log(x); }, rep.x_min,
        rep.x_max, samples, rs));
    rep.items.push_back(locate_and_sample(
        "psi < exp(x^eps)",
        [&](double x) { return std::pow(x, epsilon) - std::log(x) - lp(x); }, rep.x_min,
        rep.x_max, samples, rs));
  }
  return rep;
}

PsiSuiteReport psi_lemma26_suite(double mu, std::size_t samples, std::uint64_t seed,
                                double tol) {
  if (mu < 0.0) throw std::domain_error("psi suite: mu must be >= 0");
  PsiSuiteReport r;
  r.mu = mu;
  r.samples = samples;
  CounterStream rs(seed, 0x26);
  auto logx = [&](double lo, double hi) {
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rs.uniform());
  };
  auto le = [&](double a, double b) { return a <= b * (1.0 + tol); };
  auto P = [&](double x) { return psi_sqrt2(x, mu); };
  const double psi2 = P(2.0);
  for (std::size_t i = 0; i < samples; ++i) {
    double x1 = (i % 97 == 0) ? 0.0 : logx(1e-8, 1e6);
    double x2 = logx(1e-8, 1e6);
    // (i)
    double mu_low = mu * rs.uniform();
    if (!le(psi_sqrt2(x2, mu_low), P(x2))) ++r.monotone_mu;
    // (ii)
    if (!(P(x2) > 0.0)) ++r.positive;
    double lo = std::min(x1, x2), hi = std::max(x1, x2);
    if (lo < hi && !le(P(lo), P(hi))) ++r.increasing;
    if (!le(P(0.5 * (x1 + x2)), 0.5 * (P(x1) + P(x2)))) ++r.convex;
    // (iii)
    double c = logx(1.0 + 1e-9, 1e3);
    double x3 = logx(1e-8, 1e3);
    if (!le(P(c * x3), P(c) * P(x3))) ++r.submultiplicative;
    // (iv)
    if (!le(P(x1 + x2), 0.5 * psi2 * (P(x1) + P(x2)))) ++r.subadditive;
    // (v), in logs
    if (mu > 0.0) {
      double xv = -30.0 + 60.0 * rs.uniform();
      double yv = (i % 101 == 0) ? 0.0 : logx(1e-8, 1e8);
      double lhs = yv == 0.0 ? -INFINITY : xv + std::log(yv);
      double rhs = num::log_add_exp(xv * xv / (2.0 * mu * mu),
                                    2.0 * mu * mu + log_psi_sqrt2(yv, mu));
      if (lhs > rhs + std::log1p(tol)) ++r.young_exp;
    }
  }
  return r;
}

ExpMomentResult exp_moment_bound_check(double lam, double eps, double horizon, std::size_t paths,
                                       std::uint64_t seed) {
  if (lam < 0.0 || !(eps > 0.0) || !(horizon > 0.0))
    throw std::domain_error("exp moment: bad parameters");
  double a = lam * eps * eps * horizon;
  if (!(2.0 * a < 1.0)) throw std::domain_error("exp moment: lam >= 1/(2 eps^2 horizon)");
  ExpMomentResult r;
  r.bound = 1.0 / std::sqrt(1.0 - 2.0 * a);
  if (paths == 0) return r;
  CounterStream rs(seed, 0x27);
  double sum = 0.0, sum2 = 0.0;
  const double sd = eps * std::sqrt(horizon);
  for (std::size_t i = 0; i < paths; ++i) {
    double I = sd * rs.normal();  // integral of the constant integrand
    double v = std::exp(lam * I * I);
    sum += v;
    sum2 += v * v;
  }
  double n = double(paths);
  r.estimate = sum / n;
  double var = std::max(0.0, sum2 / n - r.estimate * r.estimate);
  r.se = std::sqrt(var / n);
  return r;
}

}  // namespace bsdelab
