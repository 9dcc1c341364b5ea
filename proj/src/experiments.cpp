#include <algorithm>
#include <cmath>
#include <sstream>

#include "bsdelab/experiments.hpp"
#include "bsdelab/rng.hpp"
#include "bsdelab/threshold_odes.hpp"

namespace bsdelab {

GeneratorModel generator_from_config(const Config& cfg, const std::string& section) {
  auto key = [&](const char* k) { return section + "." + k; };
  std::string name = cfg.get_string(key("name"), "zero");
  GeneratorModel g;
  if (name == "zero") {
    g = zero_generator();
  } else if (name == "constant") {
    g = constant_generator(cfg.get_double(key("value"), 1.0));
  } else if (name == "linear") {
    std::vector<double> w;
    if (auto s = cfg.find(key("w"))) {
      std::istringstream is(*s);
      std::string tok;
      while (std::getline(is, tok, ',')) w.push_back(std::stod(tok));
    }
    g = linear_generator(cfg.get_double(key("a"), 0.0), cfg.get_double(key("c"), 0.0), w);
  } else if (name == "gamma-abs-z") {
    g = gamma_abs_z_generator(cfg.get_double(key("gamma"), 1.0));
  } else if (name == "abs-b") {
    g = abs_b_generator(cfg.get_double(key("shift"), 0.0));
  } else if (name == "quadratic-y") {
    g = quadratic_y_generator(cfg.get_double(key("c"), 1.0));
  } else {
    ExampleParams p;
    p.beta = cfg.get_double(key("beta"), 1.0);
    p.gamma = cfg.get_double(key("gamma"), 1.0);
    p.lambda = cfg.get_double(key("lambda"), 0.0);
    p.k = cfg.get_double(key("k"), 1.0);
    g = builtin_example(name, p).g;
  }
  if (double add = cfg.get_double(key("add"), 0.0); add != 0.0) g = shifted_generator(g, add);
  return g;
}

TerminalModel terminal_from_config(const Config& cfg, const std::string& section) {
  auto key = [&](const char* k) { return section + "." + k; };
  std::string kind = cfg.get_string(key("kind"), "linear");
  double c = cfg.get_double(key("c"), 1.0);
  double shift = cfg.get_double(key("shift"), 0.0);
  if (kind == "zero") return zero_terminal();
  if (kind == "constant") return constant_terminal(c);
  if (kind == "linear") return linear_terminal(c, shift);
  if (kind == "abs") return abs_terminal(c);
  if (kind == "norm") return norm_terminal(c);
  throw std::invalid_argument("unknown terminal kind: " + kind);
}

SimConfig sim_from_config(const Config& cfg, std::uint64_t seed) {
  SimConfig s;
  s.d = static_cast<int>(cfg.get_int("sim.d", s.d));
  s.T = cfg.get_double("sim.T", s.T);
  s.steps = static_cast<int>(cfg.get_int("sim.steps", s.steps));
  s.paths = static_cast<std::size_t>(cfg.get_int("sim.paths", static_cast<long long>(s.paths)));
  s.basis_degree = static_cast<int>(cfg.get_int("sim.basis_degree", s.basis_degree));
  s.picard_iters = static_cast<int>(cfg.get_int("sim.picard_iters", s.picard_iters));
  s.picard_tol = cfg.get_double("sim.picard_tol", s.picard_tol);
  s.z_clip = cfg.get_double("sim.z_clip", s.z_clip);
  s.antithetic = cfg.get_bool("sim.antithetic", s.antithetic);
  s.seed = seed;
  s.validate();
  return s;
}

double default_eps(Regime r, double gamma) {
  switch (r) {
    case Regime::LambdaZero: return 0.0;
    case Regime::LambdaSmall: return 0.5;
    case Regime::LambdaHalf: return gamma / 2.0;
    case Regime::LambdaLarge: return 0.5;
  }
  return 0.5;
}

double regime_integrand(Regime r, double lambda, double mu, double x) {
  switch (r) {
    case Regime::LambdaZero: return psi_sqrt2(x, mu);
    case Regime::LambdaHalf: return std::pow(1.0 + x, 1.0 + mu);
    default: return psi_eval(x, mu, lambda);
  }
}

namespace {

// running left-point integral of alpha along each path, [i M + m]
std::vector<double> alpha_integrals(const AlphaFn& alpha, const PathEnsemble& ens) {
  const std::size_t M = ens.paths;
  const int N = ens.steps, d = ens.d;
  const double dt = ens.T / N;
  std::vector<double> A(M * (N + 1), 0.0);
  if (!alpha) return A;
  std::vector<double> b(d);
  for (int i = 0; i < N; ++i)
    for (std::size_t m = 0; m < M; ++m) {
      for (int j = 0; j < d; ++j) b[j] = ens.state(m, i, j);
      A[(i + 1) * M + m] = A[i * M + m] + alpha(ens.T * i / N, b) * dt;
    }
  return A;
}

std::vector<double> terminal_values(const TerminalModel& xi, const PathEnsemble& ens) {
  std::vector<double> v(ens.paths);
  std::vector<double> b(ens.d);
  for (std::size_t m = 0; m < ens.paths; ++m) {
    for (int j = 0; j < ens.d; ++j) b[j] = ens.state(m, ens.steps, j);
    v[m] = xi(b);
  }
  return v;
}

}  // namespace

BoundReport run_apriori_bound(const AprioriSetup& s) {
  const auto& gp = s.g.growth;
  BoundReport rep;
  rep.regime = gp.regime();
  rep.eps = rep.regime == Regime::LambdaZero ? 0.0 : s.eps.value_or(default_eps(rep.regime, gp.gamma));

  SampleRanges ranges;
  ranges.d = s.sim.d;
  ranges.T = s.sim.T;
  rep.envelope = envelope_check(s.g, s.envelope_samples, ranges, s.sim.seed ^ 0x61707269ull);
  if (!rep.envelope.pass())
    throw CertificationError("generator " + s.g.tag + " fails the " +
                             std::string(regime_name(rep.regime)) + " growth envelope");

  TestFunction tf = make_test_function(gp.beta, gp.gamma, gp.lambda, rep.eps, s.sim.T);
  SandwichConstant sw = psi_phi_sandwich(tf);
  rep.power_form = sw.power_form;
  rep.mu_T = tf.curve->mu_T();
  rep.nu_T = tf.curve->nu_T();
  rep.K = sw.power_form ? rep.nu_T : sw.K;
  rep.delta = tf.shift;

  PathEnsemble ens = simulate_brownian(s.sim);
  GeneratorModel gt = truncate(s.g, s.n, s.p);
  TerminalModel xt = truncate_terminal(s.xi, s.n, s.p);
  BsdeSolution sol = solve_bsde(gt, xt, ens, s.sim);
  rep.z_clamps = sol.z_clamps;

  const std::size_t M = ens.paths;
  const int N = ens.steps, d = ens.d;
  const double dt = s.sim.dt();
  auto A = alpha_integrals(gt.alpha, ens);
  auto xiv = terminal_values(xt, ens);
  auto psi_at = [&](double mu, double x) {
    double l = regime_psi_log(tf, mu, x);
    return std::exp(l);
  };
  const bool large = rep.regime == Regime::LambdaLarge;

  std::vector<double> R(M);
  for (std::size_t m = 0; m < M; ++m)
    R[m] = psi_at(rep.mu_T, std::fabs(xiv[m]) + A[std::size_t(N) * M + m]);

  std::vector<double> L(M * (N + 1));
  std::vector<double> energy(M, 0.0);  // sum_{k >= i} |Z_k|^2 dt
  for (int i = N; i >= 0; --i) {
    double mu = tf.curve->mu(s.sim.time(i));
    for (std::size_t m = 0; m < M; ++m) {
      double y = std::fabs(sol.y(m, i));
      if (large) {
        if (i < N)
          for (int j = 0; j < d; ++j) energy[m] += sol.z(m, i, j) * sol.z(m, i, j) * dt;
        L[i * M + m] = psi_at(mu, y + A[i * M + m]) + 0.5 * rep.delta * energy[m];
      } else {
        L[i * M + m] = psi_at(mu, y);
      }
    }
  }

  auto margin_of = [&](const std::vector<double>& w, int i, double wsum) {
    double sl = 0.0, sr = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      sl += w[m] * L[i * M + m];
      sr += w[m] * R[m];
    }
    double rhs = rep.K * sr / wsum + (rep.power_form ? 0.0 : rep.K);
    return std::pair{sl / wsum, rhs};
  };

  std::vector<double> ones(M, 1.0);
  for (int i = 0; i <= N; ++i) {
    auto [l, r] = margin_of(ones, i, double(M));
    rep.t.push_back(s.sim.time(i));
    rep.lhs.push_back(l);
    rep.rhs.push_back(r);
    rep.margin.push_back(r - l);
  }

  // path bootstrap; antithetic partners move together
  const std::size_t units = s.sim.antithetic ? M / 2 : M;
  CounterStream rng(s.sim.seed, 0x626f6f74ull);
  std::vector<double> w(M), sum(N + 1, 0.0), sum2(N + 1, 0.0);
  for (int b = 0; b < s.bootstrap; ++b) {
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t u = 0; u < units; ++u) {
      std::size_t k = std::min(units - 1, static_cast<std::size_t>(rng.uniform() * units));
      w[k] += 1.0;
      if (s.sim.antithetic) w[k + units] += 1.0;
    }
    for (int i = 0; i <= N; ++i) {
      auto [l, r] = margin_of(w, i, double(M));
      sum[i] += r - l;
      sum2[i] += (r - l) * (r - l);
    }
  }
  rep.se.resize(N + 1);
  for (int i = 0; i <= N; ++i) {
    double mean = sum[i] / s.bootstrap;
    rep.se[i] = std::sqrt(std::max(0.0, sum2[i] / s.bootstrap - mean * mean) * s.bootstrap /
                          std::max(1, s.bootstrap - 1));
  }
  rep.argmin = static_cast<std::size_t>(
      std::min_element(rep.margin.begin(), rep.margin.end()) - rep.margin.begin());
  rep.min_margin = rep.margin[rep.argmin];
  rep.min_margin_se = rep.se[rep.argmin];
  bool ok = true;
  for (int i = 0; i <= N; ++i) ok = ok && rep.margin[i] >= -s.se_mult * rep.se[i];
  rep.pass = ok && rep.z_clamps == 0;
  return rep;
}

ComparisonReport run_comparison(const ComparisonSetup& s) {
  ComparisonReport rep;
  PathEnsemble ens = simulate_brownian(s.sim);
  const std::size_t M = ens.paths;
  const int N = ens.steps, d = ens.d;

  auto x1 = terminal_values(s.xi, ens), x2 = terminal_values(s.xi2, ens);
  rep.terminal_ordered = true;
  for (std::size_t m = 0; m < M; ++m) rep.terminal_ordered = rep.terminal_ordered && x1[m] <= x2[m];
  if (!rep.terminal_ordered) throw CertificationError("terminal conditions are not ordered");

  SampleRanges ranges;
  ranges.d = s.sim.d;
  ranges.T = s.sim.T;
  const std::uint64_t cseed = s.sim.seed ^ 0x636d70ull;
  auto un12 = [&](const GeneratorModel& g) {
    if (!g.moduli) return false;
    return structural_checks(g, Structural::UN1, s.certificate_samples, ranges, cseed).pass() &&
           structural_checks(g, Structural::UN2, s.certificate_samples, ranges, cseed).pass();
  };
  auto un3 = [&](const GeneratorModel& g) {
    return structural_checks(g, Structural::UN3, s.certificate_samples, ranges, cseed).pass();
  };
  if (un12(s.g) || un12(s.g2))
    rep.certificate = "UN1+UN2";
  else if (un3(s.g) || un3(s.g2))
    rep.certificate = "UN3";
  else
    throw CertificationError("neither generator carries a UN1+UN2 or UN3 certificate");

  BsdeSolution a = solve_bsde(s.g, s.xi, ens, s.sim);
  BsdeSolution b = solve_bsde(s.g2, s.xi2, ens, s.sim);
  rep.y0 = a.y0();
  rep.y0_prime = b.y0();

  rep.generator_ordered = true;
  std::vector<double> bs(d), zs(d);
  for (int i = 0; i < N && rep.generator_ordered; ++i) {
    double t = s.sim.time(i);
    for (std::size_t m = 0; m < M; ++m) {
      for (int j = 0; j < d; ++j) {
        bs[j] = ens.state(m, i, j);
        zs[j] = b.z(m, i, j);
      }
      double y = b.y(m, i);
      double lo = s.g(t, bs, y, zs), hi = s.g2(t, bs, y, zs);
      if (lo > hi + 1e-12 * (1.0 + std::fabs(hi))) {
        rep.generator_ordered = false;
        break;
      }
    }
  }
  if (!rep.generator_ordered)
    throw CertificationError("g <= g' fails along the primed solution");

  rep.pass = true;
  rep.worst_violation = -INFINITY;
  for (int i = 0; i <= N; ++i) {
    const double* ya = a.y_col(i);
    const double* yb = b.y_col(i);
    double v = 0.0;
    for (std::size_t m = 0; m < M; ++m) v = std::max(v, ya[m] - yb[m]);
    int k = i == 0 ? 1 : i;
    double se = pooled_se(a.y_col(k), b.y_col(k), M, s.sim.antithetic);
    rep.t.push_back(s.sim.time(i));
    rep.max_violation.push_back(v);
    rep.se.push_back(se);
    if (v > s.se_mult * se) rep.pass = false;
    if (v > rep.worst_violation) {
      rep.worst_violation = v;
      rep.worst_se = se;
      rep.worst_step = i;
    }
  }
  return rep;
}

std::vector<ThresholdRow> run_threshold_table(const ThresholdTableSetup& s) {
  std::vector<ThresholdRow> rows;
  SimConfig sim = s.sim;
  sim.T = s.T;
  PathEnsemble ens = simulate_brownian(sim);
  auto A = alpha_integrals(s.alpha, ens);
  auto xiv = terminal_values(s.xi, ens);
  const std::size_t M = ens.paths;
  std::vector<double> x(M);
  for (std::size_t m = 0; m < M; ++m)
    x[m] = std::fabs(xiv[m]) + A[std::size_t(ens.steps) * M + m];

  for (const auto& c : s.cells) {
    ThresholdRow r;
    r.cell = c;
    r.regime = regime_for_lambda(c.lambda);
    r.mu_critical = critical_threshold(c.beta, c.gamma, c.lambda, r.regime, s.T);
    r.closed_form = closed_form_mu(s.T, c.beta, c.gamma, c.lambda, r.regime);
    r.mu_certificate = s.factor * r.mu_critical;
    std::vector<double> v(M);
    for (std::size_t m = 0; m < M; ++m)
      v[m] = regime_integrand(r.regime, c.lambda, r.mu_certificate, x[m]);
    double sum = 0.0;
    for (double q : v) sum += q;
    r.estimate = sum / M;
    r.se = pooled_se(v.data(), nullptr, M, sim.antithetic);
    r.pass = std::isfinite(r.estimate) && std::isfinite(r.se) &&
             r.se <= s.max_rel_se * std::fabs(r.estimate);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace bsdelab
