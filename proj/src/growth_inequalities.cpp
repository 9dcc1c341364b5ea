#include "bsdelab/growth_inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bsdelab/numerics.hpp"
#include "bsdelab/rng.hpp"

namespace bsdelab {

double young_power_factor(double lambda) { return std::pow(4.0, std::max(lambda - 1.0, 0.0)); }

bool young_log_holds(double x, double y, const YoungLogParams& p) {
  if (!(x > 0.0) || !(y > 0.0)) throw std::domain_error("young_log_holds: x, y must be positive");
  double lhs = 2.0 * x * y * std::pow(std::fabs(std::log(y)), p.lambda);
  double rhs = x * x * (p.k * young_power_factor(p.lambda) *
                            std::pow(std::fabs(std::log(x)), 2.0 * p.lambda) +
                        p.C) +
               y * y;
  return lhs <= rhs;
}

double young_scaled_excess(double L, double a, double k, double lambda) {
  const double kc = k * young_power_factor(lambda);
  const double la = std::log(a);
  if (lambda > 0.0 && L > 0.0 && L + la > 0.0) {
    double Ll = std::pow(L, lambda);
    double t1 = 2.0 * a * Ll * std::expm1(lambda * std::log1p(la / L));
    double d = a - Ll;
    double t2 = -d * d + (1.0 - kc) * Ll * Ll;
    return t1 + t2;
  }
  return 2.0 * a * std::pow(std::fabs(la + L), lambda) -
         kc * std::pow(std::fabs(L), 2.0 * lambda) - a * a;
}

double young_profile(double a, double k, double lambda) {
  double c = std::pow(2.0, std::max(lambda - 1.0, 0.0));
  return 2.0 * a * c * std::pow(std::fabs(std::log(a)), lambda) - (1.0 - 1.0 / k) * a * a;
}

double minimal_young_constant(double k, double lambda) {
  if (!(k > 1.0)) throw std::domain_error("minimal_young_constant: k must exceed 1");
  if (lambda < 0.0) throw std::domain_error("minimal_young_constant: lambda must be >= 0");
  auto f = [&](double u) { return young_profile(std::exp(u), k, lambda); };
  auto r = num::grid_golden_max(f, -40.0, 40.0, 10000);
  return std::max(0.0, r.value);
}

YoungScanReport young_random_scan(const YoungLogParams& p, std::size_t samples, double lo,
                                  double hi, std::uint64_t seed) {
  YoungScanReport rep;
  rep.samples = samples;
  CounterStream rs(seed, 0x59u);
  const double ll = std::log(lo), lh = std::log(hi);
  for (std::size_t i = 0; i < samples; ++i) {
    double lx = ll + (lh - ll) * rs.uniform();
    double ly = ll + (lh - ll) * rs.uniform();
    double x = std::exp(lx), y = std::exp(ly);
    double ex = young_scaled_excess(lx, y / x, p.k, p.lambda) - p.C;
    if (ex > rep.max_scaled_excess) {
      rep.max_scaled_excess = ex;
      rep.witness_x = x;
      rep.witness_y = y;
    }
    if (!young_log_holds(x, y, p)) ++rep.violations;
  }
  return rep;
}

SharpnessReport young_sharpness_scan(double k, double lambda, double C, int j_max) {
  SharpnessReport rep;
  for (int j = 1; j <= j_max; ++j) {
    double L = std::ldexp(1.0, j);
    double a = std::pow(L, lambda);
    double ex = young_scaled_excess(L, a, k, lambda) - C;
    if (ex > 0.0 && !rep.violation_found) {
      rep.violation_found = true;
      rep.first_j = j;
      rep.first_excess = ex;
    }
    rep.last_excess = ex;
  }
  return rep;
}

double sqrt_log_excess(double x, double y, double K) {
  return 2.0 * x * y * std::sqrt(std::fabs(std::log(y))) -
         2.0 * x * x * (std::fabs(std::log(x)) + K) - 0.75 * y * y;
}

namespace {
// excess / (2x^2) + K in coordinates u = ln x, v = ln y
double sqrt_log_profile(double u, double v) {
  double a = std::exp(v - u);
  return a * std::sqrt(std::fabs(v)) - 0.375 * a * a - std::fabs(u);
}
}  // namespace

SqrtLogConstant sqrt_log_constant_report() {
  const double lo = std::log(1e-8), hi = std::log(1e8);
  const int n = 1000;
  SqrtLogConstant out;
  out.K_grid = -1e300;
  for (int i = 0; i < n; ++i) {
    double u = lo + (hi - lo) * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      double v = lo + (hi - lo) * j / (n - 1);
      out.K_grid = std::max(out.K_grid, sqrt_log_profile(u, v));
    }
  }
  double best_v = 0.0;
  auto inner = [&](double u) {
    auto r = num::grid_golden_max([&](double v) { return sqrt_log_profile(u, v); }, lo, hi, 2000);
    best_v = r.arg;
    return r.value;
  };
  auto outer = num::grid_golden_max(inner, lo, hi, 1000);
  inner(outer.arg);
  out.K = std::max(outer.value, out.K_grid);
  out.arg_x = std::exp(outer.arg);
  out.arg_y = std::exp(best_v);
  return out;
}

double sqrt_log_constant() { return sqrt_log_constant_report().K; }

}  // namespace bsdelab
