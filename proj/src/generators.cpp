#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bsdelab/generators.hpp"
#include "bsdelab/rng.hpp"
#include "bsdelab/test_functions.hpp"

namespace bsdelab {

std::string num_tag(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double euclid_norm(StateSpan v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double GrowthParams::envelope(double y_abs, double z_norm) const {
  double e = 0.0;
  if (beta != 0.0) e += beta * envelope_y_term(y_abs, delta());
  if (gamma != 0.0) e += gamma * envelope_z_term(z_norm, lambda);
  return e;
}

namespace {

struct Sampler {
  CounterStream rng;
  const SampleRanges& r;

  Sampler(std::uint64_t seed, std::uint64_t stream, const SampleRanges& ranges)
      : rng(seed, stream), r(ranges) {}

  double log_uniform(double lo, double hi) {
    return std::exp(std::log(lo) + rng.uniform() * (std::log(hi) - std::log(lo)));
  }
  double sign() { return rng.uniform() < 0.5 ? -1.0 : 1.0; }
  double y() {
    double u = rng.uniform();
    if (u < 0.02) return 0.0;
    if (u < 0.04) return sign();
    return sign() * log_uniform(r.y_min, r.y_max);
  }
  void z(std::vector<double>& out) {
    double u = rng.uniform();
    double norm = u < 0.02 ? 0.0 : (u < 0.04 ? 1.0 : log_uniform(r.z_min, r.z_max));
    double s = 0.0;
    for (auto& v : out) {
      v = rng.normal();
      s += v * v;
    }
    s = std::sqrt(s);
    for (auto& v : out) v = s > 0.0 ? v / s * norm : 0.0;
  }
  void b(std::vector<double>& out) {
    for (auto& v : out) v = r.b_scale * rng.normal();
  }
  double t() { return rng.uniform() * r.T; }
  // a second point near x, relative offset log-uniform in [1e-4, 1]
  double near(double x) {
    double h = log_uniform(1e-4, 1.0) * std::max(std::fabs(x), 1e-3);
    return x + sign() * h;
  }
};

double slack(double a, double b) { return 1e-12 * (1.0 + std::fabs(a) + std::fabs(b)); }

}  // namespace

CheckReport envelope_check(const GeneratorModel& g, std::size_t samples, const SampleRanges& r,
                           std::uint64_t seed, bool one_sided) {
  CheckReport rep;
  rep.check = one_sided ? "envelope-one-sided" : "envelope";
  rep.worst_excess = -INFINITY;
  Sampler s(seed, 0x656e76, r);
  std::vector<double> b(r.d), z(r.d);
  for (std::size_t i = 0; i < samples; ++i) {
    double t = s.t();
    s.b(b);
    double y = s.y();
    if (one_sided) y = std::fabs(y);
    s.z(z);
    double gv = g(t, b, y, z);
    double a = g.alpha(t, b);
    ++rep.samples;
    double sgn = y > 0.0 ? 1.0 : -1.0;
    double lhs = one_sided ? gv : sgn * gv;
    if (lhs == -INFINITY) continue;
    if (std::isnan(lhs) || lhs == INFINITY || !std::isfinite(a)) {
      ++rep.nonfinite;
      continue;
    }
    double rhs = a + g.growth.envelope(std::fabs(y), euclid_norm(z));
    if (a < 0.0) ++rep.violations;
    double ex = lhs - rhs;
    if (ex > slack(lhs, rhs)) ++rep.violations;
    if (ex > rep.worst_excess) {
      rep.worst_excess = ex;
      rep.witness = {t, y, euclid_norm(z), gv, rhs};
    }
  }
  return rep;
}

const char* structural_name(Structural s) {
  switch (s) {
    case Structural::UN1: return "UN1";
    case Structural::UN2: return "UN2";
    case Structural::UN3: return "UN3";
  }
  return "?";
}

bool StructuralReport::pass() const {
  if (which == Structural::UN3) return convex() || concave();
  return violations == 0 && modulus_growth_violations == 0;
}

StructuralReport structural_checks(const GeneratorModel& g, Structural which, std::size_t samples,
                                   const SampleRanges& r, std::uint64_t seed) {
  if (which != Structural::UN3 && !g.moduli)
    throw std::invalid_argument("structural_checks: " + std::string(structural_name(which)) +
                                " requires moduli");
  StructuralReport rep;
  rep.which = which;
  rep.worst_excess = -INFINITY;
  Sampler s(seed, 0x737472 + static_cast<int>(which), r);
  std::vector<double> b(r.d), z1(r.d), z2(r.d), zm(r.d);
  for (std::size_t i = 0; i < samples; ++i) {
    double t = s.t();
    s.b(b);
    bool local = s.rng.uniform() < 0.5;
    double y1 = s.y();
    double y2 = local ? s.near(y1) : s.y();
    s.z(z1);
    if (local) {
      for (int j = 0; j < r.d; ++j) z2[j] = s.near(z1[j]);
    } else {
      s.z(z2);
    }
    ++rep.samples;
    if (which == Structural::UN1) {
      double ga = g(t, b, y1, z1), gb = g(t, b, y2, z1);
      double d = ga - gb;
      double sg = y1 - y2 > 0.0 ? 1.0 : -1.0;
      double u = std::fabs(y1 - y2);
      double rho = g.moduli->rho(u);
      double lhs = sg * d;
      if (!std::isfinite(lhs)) continue;
      if (lhs - rho > slack(lhs, rho) + slack(ga, gb)) ++rep.violations;
      if (rho > g.moduli->A * (u + 1.0) * (1 + 1e-12)) ++rep.modulus_growth_violations;
      if (lhs - rho - slack(ga, gb) > rep.worst_excess) {
        rep.worst_excess = lhs - rho - slack(ga, gb);
        rep.witness = {t, y1, y2, euclid_norm(z1)};
      }
    } else if (which == Structural::UN2) {
      double ga = g(t, b, y1, z1), gb = g(t, b, y1, z2);
      double d = std::fabs(ga - gb);
      double u = 0.0;
      for (int j = 0; j < r.d; ++j) u += (z1[j] - z2[j]) * (z1[j] - z2[j]);
      u = std::sqrt(u);
      double kap = g.moduli->kappa(u);
      if (!std::isfinite(d)) continue;
      if (d - kap > slack(d, kap) + slack(ga, gb)) ++rep.violations;
      if (kap > g.moduli->A * (u + 1.0) * (1 + 1e-12)) ++rep.modulus_growth_violations;
      if (d - kap - slack(ga, gb) > rep.worst_excess) {
        rep.worst_excess = d - kap - slack(ga, gb);
        rep.witness = {t, y1, euclid_norm(z1), euclid_norm(z2), u};
      }
    } else {
      for (int j = 0; j < r.d; ++j) zm[j] = 0.5 * (z1[j] + z2[j]);
      double g1 = g(t, b, y1, z1), g2 = g(t, b, y2, z2);
      double gm = g(t, b, 0.5 * (y1 + y2), zm);
      double avg = 0.5 * (g1 + g2);
      if (!std::isfinite(gm) || !std::isfinite(avg)) continue;
      double tol = slack(g1, g2) + 1e-12 * std::fabs(gm);
      double ex = gm - avg;
      if (ex > tol) ++rep.convex_violations;
      if (-ex > tol) ++rep.concave_violations;
      if (ex > rep.worst_excess) {
        rep.worst_excess = ex;
        rep.witness = {t, y1, y2, euclid_norm(z1), euclid_norm(z2)};
      }
    }
  }
  return rep;
}

double truncate_value(double v, double n, double p) {
  if (v > 0.0) return std::min(v, n);
  return -std::min(-v, p);
}

GeneratorModel truncate(const GeneratorModel& g, double n, double p) {
  if (!(n >= 1.0) || !(p >= 1.0)) throw std::invalid_argument("truncate: n, p >= 1 required");
  GeneratorModel h = g;
  h.tag = g.tag + "^{" + num_tag(n) + "," + num_tag(p) + "}";
  auto inner = g.eval;
  h.eval = [inner, n, p](double t, StateSpan b, double y, StateSpan z) {
    return truncate_value(inner(t, b, y, z), n, p);
  };
  auto a = g.alpha;
  double cap = std::max(n, p);
  h.alpha = [a, cap](double t, StateSpan b) { return std::min(a(t, b), cap); };
  h.bound = std::min(g.bound, cap);
  return h;
}

TerminalModel truncate_terminal(const TerminalModel& xi, double n, double p) {
  if (!(n >= 1.0) || !(p >= 1.0)) throw std::invalid_argument("truncate: n, p >= 1 required");
  auto inner = xi.xi;
  return {xi.tag + "^{" + num_tag(n) + "," + num_tag(p) + "}",
          [inner, n, p](StateSpan b) { return truncate_value(inner(b), n, p); }};
}

namespace {
AlphaFn const_alpha(double c) {
  return [c](double, StateSpan) { return c; };
}
}  // namespace

GeneratorModel zero_generator() { return constant_generator(0.0); }

GeneratorModel constant_generator(double c) {
  GeneratorModel g;
  g.tag = "constant(" + num_tag(c) + ")";
  g.eval = [c](double, StateSpan, double, StateSpan) { return c; };
  g.growth = {0.0, 1.0, 0.0};
  g.alpha = const_alpha(std::fabs(c));
  g.flags = {true, true, true, true, true};
  g.moduli = ModulusSpec{[](double u) { return u; }, [](double u) { return u; }, 1.0};
  g.yz_free = true;
  g.bound = std::fabs(c);
  return g;
}

GeneratorModel linear_generator(double a, double c, std::vector<double> w) {
  GeneratorModel g;
  g.tag = "linear";
  double wn = 0.0;
  for (double v : w) wn += v * v;
  wn = std::sqrt(wn);
  g.eval = [a, c, w](double, StateSpan, double y, StateSpan z) {
    double s = a * y + c;
    for (std::size_t j = 0; j < w.size() && j < z.size(); ++j) s += w[j] * z[j];
    return s;
  };
  // |a||y| <= |a| e + |a||y|sqrt(ln|y|) 1_{|y|>1}
  g.growth = {std::fabs(a) > 0.0 ? std::fabs(a) : 0.0, wn, 0.0};
  g.alpha = const_alpha(std::fabs(c) + std::fabs(a) * std::exp(1.0));
  g.flags = {true, true, true, true, true};
  double la = std::fabs(a), lw = wn;
  g.moduli = ModulusSpec{[la](double u) { return la > 0.0 ? la * u : u; },
                         [lw](double u) { return lw * u; }, std::max({la, lw, 1.0})};
  g.yz_free = a == 0.0 && wn == 0.0;
  return g;
}

GeneratorModel gamma_abs_z_generator(double gamma) {
  GeneratorModel g;
  g.tag = "gamma-abs-z(" + num_tag(gamma) + ")";
  g.eval = [gamma](double, StateSpan, double, StateSpan z) { return gamma * euclid_norm(z); };
  g.growth = {0.0, gamma, 0.0};
  g.alpha = const_alpha(0.0);
  g.flags = {true, false, true, true, true};
  g.moduli = ModulusSpec{[](double u) { return u; }, [gamma](double u) { return gamma * u; },
                         std::max(gamma, 1.0)};
  return g;
}

GeneratorModel abs_b_generator(double shift) {
  GeneratorModel g;
  g.tag = shift == 0.0 ? "abs-b" : "abs-b+" + num_tag(shift);
  g.eval = [shift](double, StateSpan b, double, StateSpan) { return euclid_norm(b) + shift; };
  g.growth = {0.0, 1.0, 0.0};
  g.alpha = [shift](double, StateSpan b) { return euclid_norm(b) + std::fabs(shift); };
  g.flags = {true, true, true, true, true};
  g.moduli = ModulusSpec{[](double u) { return u; }, [](double u) { return u; }, 1.0};
  g.yz_free = true;
  return g;
}

GeneratorModel quadratic_y_generator(double c) {
  GeneratorModel g;
  g.tag = "quadratic-y(" + num_tag(c) + ")";
  g.eval = [c](double, StateSpan, double y, StateSpan) { return c * y * y; };
  g.growth = {1.0, 1.0, 0.0};
  g.alpha = const_alpha(0.0);
  g.flags = {c >= 0.0, c <= 0.0, false, true, false};
  return g;
}

GeneratorModel shifted_generator(const GeneratorModel& g, double c) {
  GeneratorModel h = g;
  h.tag = g.tag + "+" + num_tag(c);
  auto inner = g.eval;
  h.eval = [inner, c](double t, StateSpan b, double y, StateSpan z) {
    return inner(t, b, y, z) + c;
  };
  auto a = g.alpha;
  h.alpha = [a, c](double t, StateSpan b) { return a(t, b) + std::fabs(c); };
  h.bound = g.bound + std::fabs(c);
  return h;
}

TerminalModel zero_terminal() { return constant_terminal(0.0); }

TerminalModel constant_terminal(double c) {
  return {"constant(" + num_tag(c) + ")", [c](StateSpan) { return c; }};
}

TerminalModel linear_terminal(double c, double shift) {
  return {"linear(" + num_tag(c) + "," + num_tag(shift) + ")",
          [c, shift](StateSpan b) { return c * b[0] + shift; }};
}

TerminalModel abs_terminal(double c) {
  return {"abs(" + num_tag(c) + ")", [c](StateSpan b) { return c * std::fabs(b[0]); }};
}

TerminalModel norm_terminal(double c) {
  return {"norm(" + num_tag(c) + ")", [c](StateSpan b) { return c * euclid_norm(b); }};
}

}  // namespace bsdelab
