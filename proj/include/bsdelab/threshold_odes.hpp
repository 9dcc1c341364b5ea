#pragma once

#include <optional>
#include <vector>

#include "bsdelab/regime.hpp"

namespace bsdelab {

// Constants entering nu and the test-function offsets.
struct CurveConstants {
  double C_young = 0.0;  // minimal_young_constant(1 + eps, lambda)
  double C_bar = 0.0;    // regime-specific combined constant
  double C1 = 0.0;       // small regime: beta(l+1/2)L^{2l} <= eps L^{l+1/2} + C1
  double C2 = 0.0;       // small regime z-term constant
  double C_tilde = 0.0;  // large regime: beta L <= eps L^{2l} + C_tilde
  double offset = 0.0;   // e, k_eps, 1 or k~ depending on regime
};

struct ThresholdCurve {
  Regime regime = Regime::LambdaZero;
  double beta = 0.0, gamma = 0.0, lambda = 0.0, eps = 0.0, T = 1.0;
  // s_grid is uniform in sqrt(s)
  std::vector<double> s_grid, mu_values, nu_values;
  bool has_nu = false;
  CurveConstants constants;

  bool critical() const { return eps == 0.0; }
  double mu_T() const { return mu_values.back(); }
  double nu_T() const { return nu_values.back(); }

  // Hermite interpolation in tau = sqrt(s) with exact ODE slopes.
  double mu(double s) const;
  double nu(double s) const;
  // right-hand sides of the defining equations at (s, mu(s))
  double mu_prime(double s) const;
  double nu_prime(double s) const;

  // ODE right-hand side F(mu) of the regime equation
  double rhs(double mu) const;
  // 2 mu F(mu), regular at mu = 0
  double w_rhs(double mu) const;
  // nu'(s) as a function of mu(s) (for LambdaHalf: nu'/nu)
  double nu_rate(double mu) const;
};

// Solves the regime equation; eps = 0 selects the critical curve.
ThresholdCurve solve_mu(double beta, double gamma, double lambda, double eps, double T,
                        int steps = 10000);

// Fills nu, constants and offset. Critical curves only carry nu in LambdaZero.
ThresholdCurve solve_nu(ThresholdCurve curve);

// solve_mu followed by solve_nu where nu is defined
ThresholdCurve solve_curve(double beta, double gamma, double lambda, double eps, double T,
                           int steps = 10000);

// mu(T) only, without storing the grid
double mu_terminal(double beta, double gamma, double lambda, double eps, double T,
                   int steps = 10000);

std::optional<double> closed_form_mu(double s, double beta, double gamma, double lambda,
                                     Regime regime);

double critical_threshold(double beta, double gamma, double lambda, Regime regime, double T,
                          int steps = 10000);

double invert_eps(double beta, double gamma, double lambda, Regime regime, double target_mu_T,
                  double T, int steps = 10000);

// The written unified threshold equations, covering lambda in [0, inf).
double unified_rhs(double beta, double gamma, double lambda, double eps, double mu);
double unified_mu_terminal(double beta, double gamma, double lambda, double eps, double T,
                           int steps = 10000);

struct UnifiedConsistency {
  double lambda = 0.0, eps = 0.0;
  double regime_mu_T = 0.0;   // per-regime equation
  double unified_mu_T = 0.0;  // unified equation
  double expected_ratio = 1.0;  // sqrt(2) for lambda = 0, else 1
  double relative_gap = 0.0;    // |unified - ratio*regime| / (ratio*regime)
  bool consistent = false;
};

UnifiedConsistency unified_consistency(double beta, double gamma, double lambda, double eps,
                                       double T, int steps = 10000);

// Residual max over interior midpoints of |mu' - F| / (1 + |F|).
double ode_midpoint_residual(const ThresholdCurve& c);

// Offsets of the regime test functions, given a solved curve.
double regime_offset(const ThresholdCurve& c);

}  // namespace bsdelab
