#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bsdelab/generators.hpp"

namespace bsdelab {

namespace {

// u sqrt(-ln u) for u <= e^{-1/2}, then its maximum 1/sqrt(2e)
double h_sqrt_log_cap(double u) {
  static const double knee = std::exp(-0.5);
  if (u <= 0.0) return 0.0;
  if (u <= knee) return u * std::sqrt(-std::log(u));
  return 1.0 / std::sqrt(2.0 * std::exp(1.0));
}

double y_log_sqrt_above1(double u) {  // u sqrt(ln u) 1_{u >= 1}
  return u >= 1.0 ? u * std::sqrt(std::log(u)) : 0.0;
}

double y_log_pow_above1(double u, double a) {  // u (ln u)^a 1_{u > 1}
  return u > 1.0 ? u * std::pow(std::log(u), a) : 0.0;
}

double u_log_u(double u) { return u > 0.0 ? u * std::log(u) : 0.0; }

AlphaFn abs_b_plus(double c) {
  return [c](double, StateSpan b) { return euclid_norm(b) + c; };
}

std::vector<TerminalModel> default_terminals() {
  return {linear_terminal(1.0), abs_terminal(1.0), norm_terminal(1.0)};
}

const double kE = std::exp(1.0);

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"ex3.8-g1", "ex3.8-g2", "ex4.8",   "ex5.7-g",
                                                 "ex5.7-g1", "ex5.7-g2", "ex6.7"};
  return names;
}

BuiltinExample builtin_example(const std::string& name, const ExampleParams& p) {
  const double beta = p.beta, gamma = p.gamma, k = p.k;
  GeneratorModel g;
  g.tag = name;

  if (name == "ex3.8-g1") {
    g.eval = [=](double, StateSpan b, double y, StateSpan z) {
      double zn = euclid_norm(z);
      return euclid_norm(b) - k * std::exp(y) + beta * h_sqrt_log_cap(std::fabs(y)) +
             gamma * (zn - k * std::sqrt(zn));
    };
    g.growth = {beta, gamma, 0.0};
    g.alpha = abs_b_plus(beta / std::sqrt(2.0 * kE) + k + gamma * k * k / 4.0);
    g.flags.osgood = true;
    g.flags.uniformly_continuous_z = true;
    ModulusSpec m;
    if (beta > 0.0)
      m.rho = [beta](double u) { return beta * h_sqrt_log_cap(u); };
    else
      m.rho = [](double u) { return u; };
    m.kappa = [gamma, k](double u) { return gamma * u + gamma * k * std::sqrt(u); };
    m.A = std::max({beta / std::sqrt(2.0 * kE), gamma * (1.0 + k), 1.0});
    g.moduli = m;
  } else if (name == "ex3.8-g2") {
    g.eval = [=](double, StateSpan b, double y, StateSpan z) {
      return euclid_norm(b) + k * std::exp(-y) + beta * y_log_sqrt_above1(std::fabs(y)) +
             gamma * euclid_norm(z);
    };
    g.growth = {beta, gamma, 0.0};
    g.alpha = abs_b_plus(k);
    g.flags.convex = true;
  } else if (name == "ex4.8") {
    double lam = p.lambda, a = p.lambda + 0.5;
    if (!(lam > 0.0 && lam < 0.5)) throw std::invalid_argument("ex4.8: lambda in (0, 1/2)");
    g.eval = [=](double, StateSpan b, double y, StateSpan z) {
      double zn = euclid_norm(z);
      return euclid_norm(b) + (y <= 0.0 ? k * y * y : 0.0) +
             beta * y_log_pow_above1(std::fabs(y), a) + gamma * y_log_pow_above1(zn, lam);
    };
    g.growth = {beta, gamma, lam};
    g.alpha = abs_b_plus(0.0);
    g.flags.convex = true;
  } else if (name == "ex5.7-g") {
    g.eval = [=](double, StateSpan b, double y, StateSpan z) {
      double zn = euclid_norm(z);
      double zt = zn > 0.0 ? zn * std::sqrt(std::fabs(std::log(zn))) : 0.0;
      return euclid_norm(b) + k * (std::exp(-y) - std::exp(y)) + beta * u_log_u(std::fabs(y)) +
             gamma * zt;
    };
    g.growth = {beta, gamma, 0.5};
    g.alpha = abs_b_plus(beta / kE + gamma / std::sqrt(kE) + 2.0 * k);
  } else if (name == "ex5.7-g1") {
    g.eval = [=](double, StateSpan, double y, StateSpan z) {
      double zn = euclid_norm(z), ya = std::fabs(y);
      double yt = ya <= 1.0 ? u_log_u(ya) : 0.0;
      double zt = zn > 0.0 && zn <= 1.0 ? zn * std::sqrt(-std::log(zn)) : 0.0;
      return -k * std::exp(y) + beta * yt + gamma * zt;
    };
    g.growth = {beta, gamma, 0.5};
    g.alpha = [c = k + beta / kE + gamma / std::sqrt(2.0 * kE)](double, StateSpan) { return c; };
    g.flags.osgood = true;
    g.flags.uniformly_continuous_z = true;
    ModulusSpec m;
    m.rho = [beta](double u) {
      if (beta == 0.0) return u;
      if (u <= 0.0) return 0.0;
      return beta * (u >= 1.0 ? 1.0 / kE : std::min(u * (2.0 - std::log(u)), 1.0 / kE));
    };
    m.kappa = [gamma](double u) {
      return gamma * std::min(2.0 * std::sqrt(u), 1.0 / std::sqrt(2.0 * kE));
    };
    m.A = std::max({beta, gamma, 1.0});
    g.moduli = m;
  } else if (name == "ex5.7-g2") {
    g.eval = [=](double, StateSpan b, double y, StateSpan z) {
      double zn = euclid_norm(z), ya = std::fabs(y);
      double zt = zn > 1.0 ? zn * std::sqrt(std::log(zn)) : 0.0;
      return euclid_norm(b) + k * std::exp(-y) + beta * (ya > 1.0 ? u_log_u(ya) : 0.0) +
             gamma * zt;
    };
    g.growth = {beta, gamma, 0.5};
    g.alpha = abs_b_plus(k);
    g.flags.convex = true;
  } else if (name == "ex6.7") {
    double lam = p.lambda;
    if (!(lam > 0.5)) throw std::invalid_argument("ex6.7: lambda > 1/2");
    g.eval = [=](double, StateSpan b, double y, StateSpan z) {
      double ya = std::fabs(y);
      return euclid_norm(b) + (y <= 0.0 ? k * y * y : 0.0) +
             beta * (ya > 1.0 ? u_log_u(ya) : 0.0) + gamma * y_log_pow_above1(euclid_norm(z), lam);
    };
    g.growth = {beta, gamma, lam};
    g.alpha = abs_b_plus(0.0);
    g.flags.convex = true;
  } else {
    throw std::invalid_argument("unknown builtin generator: " + name);
  }
  return {std::move(g), default_terminals()};
}

}  // namespace bsdelab
