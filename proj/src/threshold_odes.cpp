#include "bsdelab/threshold_odes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bsdelab/growth_inequalities.hpp"
#include "bsdelab/numerics.hpp"

namespace bsdelab {

Regime regime_for_lambda(double lambda) {
  if (!(lambda >= 0.0)) throw std::domain_error("lambda must be >= 0");
  if (lambda == 0.0) return Regime::LambdaZero;
  if (lambda < 0.5) return Regime::LambdaSmall;
  if (lambda == 0.5) return Regime::LambdaHalf;
  return Regime::LambdaLarge;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::LambdaZero: return "LambdaZero";
    case Regime::LambdaSmall: return "LambdaSmall";
    case Regime::LambdaHalf: return "LambdaHalf";
    case Regime::LambdaLarge: return "LambdaLarge";
  }
  return "?";
}

Regime regime_from_name(const std::string& n) {
  if (n == "LambdaZero") return Regime::LambdaZero;
  if (n == "LambdaSmall") return Regime::LambdaSmall;
  if (n == "LambdaHalf") return Regime::LambdaHalf;
  if (n == "LambdaLarge") return Regime::LambdaLarge;
  throw std::invalid_argument("unknown regime " + n);
}

double growth_delta(double lambda) { return std::min(lambda + 0.5, 1.0); }
double psi_exponent(double lambda) { return std::max(lambda + 0.5, 2.0 * lambda); }
double k_lambda(double lambda) {
  return std::pow(2.0, 2.0 * std::max(lambda - 1.0, 0.0) + 2.0 * lambda - 1.0);
}

namespace {

// F(mu) = A + B mu + C / mu
struct Coeffs {
  double A = 0, B = 0, C = 0;
  double f(double mu) const { return A + B * mu + C / mu; }
  double w(double mu) const { return 2.0 * C + 2.0 * A * mu + 2.0 * B * mu * mu; }
};

Coeffs regime_coeffs(Regime r, double beta, double gamma, double lambda, double eps) {
  const double g2 = gamma * gamma;
  switch (r) {
    case Regime::LambdaZero:
      return {std::numbers::sqrt2 / 2.0 * beta, 0.0, g2 / 2.0};
    case Regime::LambdaSmall:
      return {eps + beta, eps, g2 * std::pow(1.0 + eps, 2.0 * lambda + 2.0) / (2.0 * lambda + 1.0)};
    case Regime::LambdaHalf:
      return {g2 * (1.0 + eps) / 2.0 + beta, beta, g2 * (1.0 + eps) / 2.0};
    case Regime::LambdaLarge: {
      double kl = k_lambda(lambda);
      return {g2 * (1.0 + eps) * kl / 2.0 + eps, 2.0 * beta * lambda,
              g2 * (1.0 + eps) * kl / (4.0 * lambda)};
    }
  }
  return {};
}

Coeffs unified_coeffs(double beta, double gamma, double lambda, double eps) {
  const double g2 = gamma * gamma;
  if (lambda < 0.5)
    return {eps + beta, eps, g2 * std::pow(1.0 + eps, 2.0 * lambda + 2.0) / (2.0 * lambda + 1.0)};
  if (lambda == 0.5) return {g2 * (1.0 + eps) / 2.0 + beta, beta, g2 * (1.0 + eps) / 2.0};
  double c = g2 * (1.0 + eps) * k_lambda(lambda) / (4.0 * lambda);
  return {c + eps, 2.0 * beta * lambda, c};
}

void validate(Regime r, double beta, double gamma, double lambda, double eps, double T) {
  if (!(beta >= 0.0) || !(gamma >= 0.0) || !(lambda >= 0.0) || !(eps >= 0.0))
    throw std::invalid_argument("threshold parameters must be non-negative");
  if (!(T > 0.0)) throw std::invalid_argument("horizon T must be positive");
  if (regime_for_lambda(lambda) != r) throw std::invalid_argument("regime does not match lambda");
  if (r == Regime::LambdaZero) {
    if (!(beta + gamma > 0.0)) throw std::invalid_argument("LambdaZero needs beta + gamma > 0");
    if (eps != 0.0) throw std::invalid_argument("LambdaZero curve has no eps family");
  } else if (!(gamma > 0.0)) {
    throw std::invalid_argument(std::string(regime_name(r)) + " needs gamma > 0");
  }
}

// Integrates F = A + B mu + C/mu from mu(0) = mu0 on tau = sqrt(s) in
// [0, sqrt(T)]. With C > 0 the state is w = mu^2, otherwise mu itself.
template <class Sink>
void integrate(const Coeffs& co, double mu0, double T, int steps, Sink&& sink) {
  const double h = std::sqrt(T) / steps;
  const bool use_w = co.C > 0.0;
  auto deriv = [&](double tau, double x) {
    if (use_w) return 2.0 * tau * co.w(std::sqrt(std::max(x, 0.0)));
    return 2.0 * tau * (co.A + co.B * x);
  };
  double x = use_w ? mu0 * mu0 : mu0;
  sink(0, use_w ? std::sqrt(x) : x);
  auto rk4 = [&](double tau, double dt) {
    double k1 = deriv(tau, x);
    double k2 = deriv(tau + 0.5 * dt, x + 0.5 * dt * k1);
    double k3 = deriv(tau + 0.5 * dt, x + 0.5 * dt * k2);
    double k4 = deriv(tau + dt, x + dt * k3);
    x += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  };
  for (int i = 0; i < steps; ++i) {
    double tau = h * i;
    if (use_w && mu0 == 0.0 && i < 64) {
      // sqrt(w) is badly resolved by the stages of the first steps out of w = 0
      const int sub = i == 0 ? 1024 : 64;
      for (int j = 0; j < sub; ++j) rk4(tau + h * j / sub, h / sub);
    } else {
      rk4(tau, h);
    }
    sink(i + 1, use_w ? std::sqrt(std::max(x, 0.0)) : x);
  }
}

double sup_over_logL(double L0, const num::ScalarFn& f) {
  double t0 = std::log(L0);
  auto r = num::grid_golden_max([&](double t) { return f(std::exp(t)); }, t0, t0 + 30.0, 10000);
  return r.value;
}

}  // namespace

double ThresholdCurve::rhs(double m) const {
  return regime_coeffs(regime, beta, gamma, lambda, eps).f(m);
}

double ThresholdCurve::w_rhs(double m) const {
  return regime_coeffs(regime, beta, gamma, lambda, eps).w(m);
}

double ThresholdCurve::nu_rate(double m) const {
  const double g2 = gamma * gamma;
  const auto& k = constants;
  switch (regime) {
    case Regime::LambdaZero:
      return std::numbers::sqrt2 / 2.0 * beta * m + g2 / 2.0 * (1.0 + std::numbers::sqrt2 / m);
    case Regime::LambdaSmall: return k.C1 * m + k.C2;
    case Regime::LambdaHalf: return g2 * k.C_bar * (1.0 + m);
    case Regime::LambdaLarge:
      return g2 / (4.0 * lambda) * k.C_bar / m + g2 * k.C_bar / 2.0 + k.C_tilde;
  }
  return 0.0;
}

namespace {
struct Cell {
  std::size_t i;
  double t0, t1;
};
Cell locate(const ThresholdCurve& c, double s) {
  if (!(s >= 0.0) || s > c.T * (1 + 1e-12)) throw std::domain_error("s outside [0, T]");
  const std::size_t n = c.s_grid.size() - 1;
  const double h = std::sqrt(c.T) / n;
  double tau = std::sqrt(std::min(s, c.T));
  std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(tau / h), n - 1);
  return {i, h * i, h * (i + 1)};
}

double mu_tau_slope(const ThresholdCurve& c, std::size_t i) {
  double tau = std::sqrt(c.s_grid[i]);
  double m = c.mu_values[i];
  if (i == 0 && m == 0.0) return std::sqrt(c.w_rhs(0.0));
  return 2.0 * tau * c.rhs(m);
}

// d nu / d tau at node i for the additive regimes, or d log nu / d tau for LambdaHalf
double nu_tau_integrand(const ThresholdCurve& c, std::size_t i) {
  double tau = std::sqrt(c.s_grid[i]);
  double m = c.mu_values[i];
  if (i == 0) {
    if (m != 0.0 || c.gamma == 0.0) return 0.0;
    // 2 tau / mu -> 2 / mu_tau(0) for the 1/mu part; other parts vanish
    double slope0 = std::sqrt(c.w_rhs(0.0));
    if (c.regime == Regime::LambdaZero)
      return c.gamma * c.gamma / 2.0 * std::numbers::sqrt2 * 2.0 / slope0;
    return 0.0;
  }
  return 2.0 * tau * c.nu_rate(m);
}
}  // namespace

double ThresholdCurve::mu(double s) const {
  auto c = locate(*this, s);
  return num::hermite(c.t0, c.t1, mu_values[c.i], mu_values[c.i + 1], mu_tau_slope(*this, c.i),
                      mu_tau_slope(*this, c.i + 1), std::sqrt(std::min(s, T)));
}

double ThresholdCurve::mu_prime(double s) const { return rhs(mu(s)); }

double ThresholdCurve::nu(double s) const {
  if (!has_nu) throw std::logic_error("nu is not defined on this curve");
  auto c = locate(*this, s);
  double tau = std::sqrt(std::min(s, T));
  double d0 = nu_tau_integrand(*this, c.i), d1 = nu_tau_integrand(*this, c.i + 1);
  if (regime == Regime::LambdaHalf) {
    double l0 = std::log(nu_values[c.i]), l1 = std::log(nu_values[c.i + 1]);
    return std::exp(num::hermite(c.t0, c.t1, l0, l1, d0, d1, tau));
  }
  return num::hermite(c.t0, c.t1, nu_values[c.i], nu_values[c.i + 1], d0, d1, tau);
}

double ThresholdCurve::nu_prime(double s) const {
  double r = nu_rate(mu(s));
  return regime == Regime::LambdaHalf ? r * nu(s) : r;
}

ThresholdCurve solve_mu(double beta, double gamma, double lambda, double eps, double T,
                        int steps) {
  Regime r = regime_for_lambda(lambda);
  validate(r, beta, gamma, lambda, eps, T);
  if (steps < 2) throw std::invalid_argument("steps must be >= 2");
  ThresholdCurve c;
  c.regime = r;
  c.beta = beta;
  c.gamma = gamma;
  c.lambda = lambda;
  c.eps = eps;
  c.T = T;
  c.s_grid.resize(steps + 1);
  c.mu_values.resize(steps + 1);
  const double h = std::sqrt(T) / steps;
  for (int i = 0; i <= steps; ++i) {
    double tau = h * i;
    c.s_grid[i] = tau * tau;
  }
  c.s_grid.back() = T;
  integrate(regime_coeffs(r, beta, gamma, lambda, eps), eps, T, steps,
            [&](int i, double m) { c.mu_values[i] = m; });
  return c;
}

double regime_offset(const ThresholdCurve& c) {
  const double e = std::numbers::e;
  switch (c.regime) {
    case Regime::LambdaZero: return e;
    case Regime::LambdaHalf: return 1.0;
    case Regime::LambdaSmall: {
      if (c.eps <= 0.0) throw std::logic_error("offset needs eps > 0");
      double ep = c.eps;
      return std::exp((1.0 + ep) / (2.0 * ep)) + std::pow(1.0 / (2.0 * ep * ep), 1.0 / (2.0 * ep)) +
             c.mu_T() / c.gamma + e;
    }
    case Regime::LambdaLarge: {
      double q = 2.0 * c.lambda * c.mu_T() / c.gamma;
      return e + q * q;
    }
  }
  return e;
}

ThresholdCurve solve_nu(ThresholdCurve c) {
  if (c.mu_values.empty()) throw std::invalid_argument("solve_nu: missing mu curve");
  const double g2 = c.gamma * c.gamma;
  const double ep = c.eps;
  auto& k = c.constants;
  if (c.regime != Regime::LambdaZero && ep <= 0.0) {
    c.has_nu = false;
    return c;
  }
  switch (c.regime) {
    case Regime::LambdaZero:
      k.offset = regime_offset(c);
      break;
    case Regime::LambdaSmall: {
      const double l = c.lambda, a = l + 0.5;
      k.C_young = minimal_young_constant(1.0 + ep, l);
      k.C_bar = (1.0 + ep) * std::pow(std::fabs(std::log(2.0 * c.gamma * (1.0 + ep) / ep)), 2.0 * l) +
                k.C_young;
      k.offset = regime_offset(c);
      double L0 = std::log(k.offset);
      k.C1 = std::max(0.0, sup_over_logL(L0, [&](double L) {
                        return c.beta * a * std::pow(L, 2.0 * l) - ep * std::pow(L, a);
                      }));
      const double cb = k.C_bar;
      k.C2 = std::max(0.0, sup_over_logL(L0, [&](double L) {
                        return g2 * (1.0 + ep) / 2.0 *
                                   (std::pow(1.0 + ep, 2.0 * l + 1.0) * std::pow(L, 2.0 * l) + cb +
                                    cb * std::pow(L, 0.5 - l) / (a * ep)) -
                               ep * std::pow(L, a);
                      }));
      break;
    }
    case Regime::LambdaHalf: {
      k.C_young = minimal_young_constant(1.0 + ep, 0.5);
      k.C_bar = ((1.0 + ep) * std::fabs(std::log(c.gamma) - std::log(ep)) + k.C_young) / (2.0 * ep);
      k.offset = 1.0;
      break;
    }
    case Regime::LambdaLarge: {
      const double l = c.lambda;
      k.C_young = minimal_young_constant(1.0 + ep, l);
      k.C_bar = (1.0 + ep) * k_lambda(l) *
                    std::pow(std::fabs(std::log(c.gamma / (2.0 * l * ep))), 2.0 * l) +
                k.C_young;
      k.offset = regime_offset(c);
      double L0 = std::log(k.offset);
      k.C_tilde = std::max(0.0, sup_over_logL(L0, [&](double L) {
                             return c.beta * L - ep * std::pow(L, 2.0 * l);
                           }));
      break;
    }
  }
  c.has_nu = true;
  const std::size_t n = c.s_grid.size();
  const double h = std::sqrt(c.T) / (n - 1);
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = nu_tau_integrand(c, i);
  auto I = num::cumulative_simpson(q, h);
  c.nu_values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    c.nu_values[i] = c.regime == Regime::LambdaHalf ? std::exp(I[i]) : I[i];
  return c;
}

ThresholdCurve solve_curve(double beta, double gamma, double lambda, double eps, double T,
                           int steps) {
  return solve_nu(solve_mu(beta, gamma, lambda, eps, T, steps));
}

double mu_terminal(double beta, double gamma, double lambda, double eps, double T, int steps) {
  Regime r = regime_for_lambda(lambda);
  validate(r, beta, gamma, lambda, eps, T);
  double out = 0.0;
  integrate(regime_coeffs(r, beta, gamma, lambda, eps), eps, T, steps,
            [&](int, double m) { out = m; });
  return out;
}

std::optional<double> closed_form_mu(double s, double beta, double gamma, double lambda,
                                     Regime regime) {
  if (s < 0.0) return std::nullopt;
  if (regime == Regime::LambdaZero) {
    if (beta == 0.0 && gamma > 0.0) return gamma * std::sqrt(s);
    if (gamma == 0.0 && beta > 0.0) return std::numbers::sqrt2 / 2.0 * beta * s;
    return std::nullopt;
  }
  if (regime == Regime::LambdaSmall && beta == 0.0 && gamma > 0.0 && lambda >= 0.0 &&
      lambda < 0.5)
    return gamma * std::sqrt(s) / std::sqrt(lambda + 0.5);
  return std::nullopt;
}

double critical_threshold(double beta, double gamma, double lambda, Regime regime, double T,
                          int steps) {
  validate(regime, beta, gamma, lambda, 0.0, T);
  return mu_terminal(beta, gamma, lambda, 0.0, T, steps);
}

double invert_eps(double beta, double gamma, double lambda, Regime regime, double target,
                  double T, int steps) {
  if (regime == Regime::LambdaZero)
    throw std::invalid_argument("invert_eps: LambdaZero has no eps family");
  double crit = critical_threshold(beta, gamma, lambda, regime, T, steps);
  if (!(target > crit)) throw std::domain_error("invert_eps: target must exceed the critical value");
  auto f = [&](double e) { return mu_terminal(beta, gamma, lambda, e, T, steps) - target; };
  double lo = 0.0, hi = 1.0;
  int grow = 0;
  while (f(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 80) throw std::domain_error("invert_eps: target out of reach");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double v = f(mid);
    if (std::fabs(v) <= 1e-10 * target || hi - lo < 1e-15 * hi) return mid;
    (v < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double unified_rhs(double beta, double gamma, double lambda, double eps, double mu) {
  return unified_coeffs(beta, gamma, lambda, eps).f(mu);
}

double unified_mu_terminal(double beta, double gamma, double lambda, double eps, double T,
                           int steps) {
  if (!(gamma > 0.0)) throw std::invalid_argument("unified equation needs gamma > 0");
  if (lambda == 0.0 && eps != 0.0) throw std::invalid_argument("eps family needs lambda > 0");
  double out = 0.0;
  integrate(unified_coeffs(beta, gamma, lambda, eps), eps, T, steps,
            [&](int, double m) { out = m; });
  return out;
}

UnifiedConsistency unified_consistency(double beta, double gamma, double lambda, double eps,
                                       double T, int steps) {
  UnifiedConsistency u;
  u.lambda = lambda;
  u.eps = eps;
  u.regime_mu_T = mu_terminal(beta, gamma, lambda, eps, T, steps);
  u.unified_mu_T = unified_mu_terminal(beta, gamma, lambda, eps, T, steps);
  u.expected_ratio = lambda == 0.0 ? std::numbers::sqrt2 : 1.0;
  double ref = u.expected_ratio * u.regime_mu_T;
  u.relative_gap = std::fabs(u.unified_mu_T - ref) / ref;
  u.consistent = u.relative_gap <= 1e-8;
  return u;
}

double ode_midpoint_residual(const ThresholdCurve& c) {
  const std::size_t n = c.s_grid.size() - 1;
  const double h = std::sqrt(c.T) / n;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double t0 = h * i, t1 = h * (i + 1), tm = 0.5 * (t0 + t1);
    double y0 = c.mu_values[i], y1 = c.mu_values[i + 1];
    double d0 = mu_tau_slope(c, i), d1 = mu_tau_slope(c, i + 1);
    double m = num::hermite(t0, t1, y0, y1, d0, d1, tm);
    double slope = num::hermite_slope(t0, t1, y0, y1, d0, d1, tm) / (2.0 * tm);
    double F = c.rhs(m);
    worst = std::max(worst, std::fabs(slope - F) / (1.0 + std::fabs(F)));
  }
  return worst;
}

}  // namespace bsdelab
