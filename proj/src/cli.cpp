#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "bsdelab/experiments.hpp"
#include "bsdelab/growth_inequalities.hpp"
#include "bsdelab/threshold_odes.hpp"

namespace bsdelab {

namespace {

using nlohmann::json;

constexpr int kPass = 0, kUsage = 1, kFail = 2;
constexpr std::uint64_t kDefaultSeed = 20240611;

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "sectioned key-value config file");
  sub->add_option("--out-dir", c.out_dir, "output directory");
  sub->add_option("--seed", c.seed, "seed (overrides BSDELAB_SEED and sim.seed)");
  sub->add_option("--set", c.sets, "override, section.key=value")->take_all();
}

Config load_config(const Common& c) {
  Config cfg = c.config_path.empty() ? Config{} : Config::load(c.config_path);
  for (const auto& s : c.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value: " + s);
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  return cfg;
}

struct Output {
  std::filesystem::path dir;
  std::uint64_t seed = 0;
  std::string hash;

  json meta(const Config& cfg) const {
    json m;
    m["seed"] = seed;
    m["config_hash"] = hash;
    m["version"] = version_string();
    json res = json::object();
    for (const auto& [k, v] : cfg.resolved()) res[k] = v;
    m["config"] = res;
    return m;
  }
  std::string stamp() const {
    return "seed=" + std::to_string(seed) + ",config_hash=" + hash + ",version=" + version_string();
  }
  std::ofstream csv(const std::string& name) const {
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    os.precision(17);
    os << "# " << stamp() << "\n";
    return os;
  }
  void write_json(const std::string& name, json j, const Config& cfg) const {
    j["meta"] = meta(cfg);
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    os << j.dump(2) << "\n";
  }
};

Output make_output(const Common& c, const Config& cfg, std::uint64_t seed) {
  Output o;
  o.dir = c.out_dir;
  std::filesystem::create_directories(o.dir);
  o.seed = seed;
  o.hash = cfg.hash();
  return o;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) v.push_back(std::stod(tok));
  return v;
}

// ---- subcommands ---------------------------------------------------------------

struct ThresholdArgs {
  std::optional<double> beta, gamma, lambda, T, eps;
  bool critical = false, table = false;
  int steps = 10000;
};

int cmd_thresholds(const Common& c, const ThresholdArgs& a) {
  Config cfg = load_config(c);
  auto put = [&](const char* k, const std::optional<double>& v) {
    if (v) {
      std::ostringstream os;
      os.precision(17);
      os << *v;
      cfg.set(std::string("thresholds.") + k, os.str());
    }
  };
  put("beta", a.beta);
  put("gamma", a.gamma);
  put("lambda", a.lambda);
  put("T", a.T);
  put("eps", a.eps);
  if (a.critical) cfg.set("thresholds.critical", "true");
  std::uint64_t seed = resolve_seed(cfg, c.seed, kDefaultSeed);
  Output out = make_output(c, cfg, seed);

  if (a.table || cfg.get_bool("thresholds.table", false)) {
    ThresholdTableSetup ts;
    ts.T = cfg.get_double("thresholds.T", 1.0);
    ts.factor = cfg.get_double("thresholds.factor", 1.05);
    std::string cells = cfg.get_string("thresholds.cells", "0,1,0;0,1,0.25;1,1,0.5;1,1,1");
    std::istringstream is(cells);
    std::string row;
    while (std::getline(is, row, ';')) {
      auto v = parse_list(row);
      if (v.size() != 3) throw std::invalid_argument("thresholds.cells: beta,gamma,lambda;...");
      ts.cells.push_back({v[0], v[1], v[2]});
    }
    ts.xi = terminal_from_config(cfg);
    ts.sim = sim_from_config(cfg, seed);
    auto rows = run_threshold_table(ts);
    auto os = out.csv("thresholds_table.csv");
    os << "beta,gamma,lambda,regime,mu_critical,closed_form,mu_certificate,estimate,se,pass\n";
    json j;
    j["rows"] = json::array();
    bool all = true;
    for (const auto& r : rows) {
      os << r.cell.beta << "," << r.cell.gamma << "," << r.cell.lambda << ","
         << regime_name(r.regime) << "," << r.mu_critical << ","
         << (r.closed_form ? std::to_string(*r.closed_form) : "") << "," << r.mu_certificate
         << "," << r.estimate << "," << r.se << "," << (r.pass ? "PASS" : "FAIL") << "\n";
      j["rows"].push_back({{"beta", r.cell.beta},
                           {"gamma", r.cell.gamma},
                           {"lambda", r.cell.lambda},
                           {"regime", regime_name(r.regime)},
                           {"mu_critical", r.mu_critical},
                           {"mu_certificate", r.mu_certificate},
                           {"estimate", r.estimate},
                           {"se", r.se},
                           {"pass", r.pass}});
      all = all && r.pass;
    }
    j["pass"] = all;
    out.write_json("thresholds_table.json", j, cfg);
    std::cout << j["rows"].dump() << "\n";
    return all ? kPass : kFail;
  }

  double beta = cfg.get_double("thresholds.beta", 0.0);
  double gamma = cfg.get_double("thresholds.gamma", 1.0);
  double lambda = cfg.get_double("thresholds.lambda", 0.0);
  double T = cfg.get_double("thresholds.T", 1.0);
  bool critical = cfg.get_bool("thresholds.critical", false);
  Regime r = regime_for_lambda(lambda);
  double eps = critical || r == Regime::LambdaZero ? 0.0
                                                   : cfg.get_double("thresholds.eps", default_eps(r, gamma));
  ThresholdCurve curve = solve_curve(beta, gamma, lambda, eps, T, a.steps);
  auto os = out.csv("thresholds.csv");
  os << "s,mu,nu\n";
  std::size_t stride = std::max<std::size_t>(1, curve.s_grid.size() / 1000);
  for (std::size_t i = 0; i < curve.s_grid.size(); i += stride) {
    os << curve.s_grid[i] << "," << curve.mu_values[i] << ",";
    if (curve.has_nu) os << curve.nu_values[i];
    os << "\n";
  }
  json j;
  j["regime"] = regime_name(r);
  j["beta"] = beta;
  j["gamma"] = gamma;
  j["lambda"] = lambda;
  j["T"] = T;
  j["eps"] = eps;
  j["critical"] = eps == 0.0;
  j["mu_T"] = curve.mu_T();
  j["nu_T"] = curve.has_nu ? json(curve.nu_T()) : json(nullptr);
  if (auto cf = closed_form_mu(T, beta, gamma, lambda, r); cf && eps == 0.0) j["closed_form_mu_T"] = *cf;
  out.write_json("thresholds.json", j, cfg);
  std::cout << json{{"mu_T", curve.mu_T()}, {"regime", regime_name(r)}}.dump() << "\n";
  return kPass;
}

int cmd_inequality(const Common& c) {
  Config cfg = load_config(c);
  std::uint64_t seed = resolve_seed(cfg, c.seed, kDefaultSeed);
  Output out = make_output(c, cfg, seed);
  double k = cfg.get_double("inequality.k", 2.0);
  double lambda = cfg.get_double("inequality.lambda", 1.0);
  auto samples = static_cast<std::size_t>(cfg.get_int("inequality.samples", 1000000));
  double Cmin = minimal_young_constant(k, lambda);
  YoungLogParams p{k, lambda, Cmin + 1e-9};
  auto scan = young_random_scan(p, samples, 1e-6, 1e6, seed);
  double k_sharp = 1.0 / young_power_factor(lambda);
  auto sharp = young_sharpness_scan(k_sharp, lambda, cfg.get_double("inequality.sharp_C", 1e6));
  auto sq = sqrt_log_constant_report();

  auto os = out.csv("inequality.csv");
  os << "check,value\n";
  os << "minimal_young_constant," << Cmin << "\n";
  os << "random_scan_violations," << scan.violations << "\n";
  os << "sharpness_violation_found," << sharp.violation_found << "\n";
  os << "sharpness_first_j," << sharp.first_j << "\n";
  os << "sqrt_log_K," << sq.K << "\n";
  os << "sqrt_log_K_grid," << sq.K_grid << "\n";
  json j{{"k", k},
         {"lambda", lambda},
         {"minimal_young_constant", Cmin},
         {"samples", scan.samples},
         {"violations", scan.violations},
         {"max_scaled_excess", scan.max_scaled_excess},
         {"sharpness", {{"k", k_sharp}, {"violation_found", sharp.violation_found}, {"first_j", sharp.first_j}}},
         {"sqrt_log_constant", {{"K", sq.K}, {"K_grid", sq.K_grid}}}};
  bool pass = scan.violations == 0;
  j["pass"] = pass;
  out.write_json("inequality.json", j, cfg);
  std::cout << "minimal_young_constant=" << Cmin << " violations=" << scan.violations << "\n";
  return pass ? kPass : kFail;
}

int cmd_verify_testfn(const Common& c) {
  Config cfg = load_config(c);
  std::uint64_t seed = resolve_seed(cfg, c.seed, kDefaultSeed);
  Output out = make_output(c, cfg, seed);
  double T = cfg.get_double("testfn.T", 1.0);
  std::vector<double> lambdas = parse_list(cfg.get_string("testfn.lambdas", "0,0.25,0.5,1"));
  std::string pairs = cfg.get_string("testfn.pairs", "0,1;1,1;2,0.5;1,0");
  int ns = static_cast<int>(cfg.get_int("testfn.ns", 30));
  int nx = static_cast<int>(cfg.get_int("testfn.nx", 120));
  std::vector<std::pair<double, double>> bg;
  std::istringstream is(pairs);
  std::string row;
  while (std::getline(is, row, ';')) {
    auto v = parse_list(row);
    if (v.size() != 2) throw std::invalid_argument("testfn.pairs: beta,gamma;...");
    bg.push_back({v[0], v[1]});
  }
  auto os = out.csv("verify_testfn.csv");
  os << "regime,beta,gamma,lambda,eps,min_scaled,arg_s,arg_x,arg_z,min_at_minimizer,signs_ok,pass\n";
  json j;
  j["rows"] = json::array();
  bool all = true;
  for (double lam : lambdas) {
    Regime r = regime_for_lambda(lam);
    for (auto [beta, gamma] : bg) {
      if (r != Regime::LambdaZero && gamma == 0.0) continue;
      if (r == Regime::LambdaZero && beta + gamma == 0.0) continue;
      double eps = cfg.get_double(std::string("testfn.eps_") + regime_name(r), default_eps(r, gamma));
      if (r == Regime::LambdaZero) eps = 0.0;
      TestFunction tf = make_test_function(beta, gamma, lam, eps, T);
      auto rep = verify_residual_grid(tf, ns, nx, nx);
      bool pass = rep.pass();
      all = all && pass;
      os << regime_name(r) << "," << beta << "," << gamma << "," << lam << "," << eps << ","
         << rep.min_scaled << "," << rep.arg_s << "," << rep.arg_x << "," << rep.arg_z << ","
         << rep.min_scaled_at_minimizer << "," << rep.derivative_signs_ok << ","
         << (pass ? "PASS" : "FAIL") << "\n";
      j["rows"].push_back({{"regime", regime_name(r)},
                           {"beta", beta},
                           {"gamma", gamma},
                           {"lambda", lam},
                           {"eps", eps},
                           {"min_scaled", rep.min_scaled},
                           {"pass", pass}});
    }
  }
  j["pass"] = all;
  out.write_json("verify_testfn.json", j, cfg);
  std::cout << (all ? "PASS" : "FAIL") << "\n";
  return all ? kPass : kFail;
}

json solution_summary(const BsdeSolution& s) {
  auto norms = empirical_norms(s, 2.0);
  return {{"y0", s.y0()},
          {"y0_se", s.y0_se},
          {"sp2", norms.sp_norm},
          {"mp2", norms.mp_norm},
          {"z_clamps", s.z_clamps},
          {"certifying", s.certifying()},
          {"max_residual", s.max_residual()},
          {"generator", s.generator_tag},
          {"terminal", s.terminal_tag}};
}

int cmd_solve(const Common& c) {
  Config cfg = load_config(c);
  std::uint64_t seed = resolve_seed(cfg, c.seed, kDefaultSeed);
  Output out = make_output(c, cfg, seed);
  GeneratorModel g = generator_from_config(cfg);
  TerminalModel xi = terminal_from_config(cfg);
  SimConfig sim = sim_from_config(cfg, seed);
  PathEnsemble ens = simulate_brownian(sim);
  json j;

  if (auto levels = cfg.find("family.levels")) {
    auto sched = grid_schedule(parse_list(*levels));
    auto fam = solve_truncated_family(g, xi, ens, sim, sched);
    BsdeSolution lim = monotone_limit(fam.members, sched);
    auto os = out.csv("family.csv");
    os << "n,p,y0,y0_se\n";
    for (std::size_t k = 0; k < sched.size(); ++k)
      os << sched[k].first << "," << sched[k].second << "," << fam.report.y0[k] << ","
         << fam.report.y0_se[k] << "\n";
    j["family"] = {{"monotone", fam.report.monotone()},
                   {"limit_y0", lim.y0()},
                   {"diagonal_gaps", fam.report.diagonal_gaps}};
    j["solution"] = solution_summary(lim);
    write_solution_csv(lim, (out.dir / "solve.csv").string(),
                       static_cast<std::size_t>(cfg.get_int("output.paths", 64)), out.stamp());
    out.write_json("solve.json", j, cfg);
    std::cout << "limit y0=" << lim.y0() << "\n";
    return fam.report.monotone() ? kPass : kFail;
  }

  if (cfg.has("truncation.n") || cfg.has("truncation.p")) {
    double n = cfg.get_double("truncation.n", 1e300), p = cfg.get_double("truncation.p", 1e300);
    g = truncate(g, n, p);
    xi = truncate_terminal(xi, n, p);
  }
  BsdeSolution sol = solve_bsde(g, xi, ens, sim);
  write_solution_csv(sol, (out.dir / "solve.csv").string(),
                     static_cast<std::size_t>(cfg.get_int("output.paths", 64)), out.stamp());
  j["solution"] = solution_summary(sol);
  int code = kPass;
  if (auto y = cfg.find("oracle.y0")) {
    double expect = std::stod(*y), tol = cfg.get_double("oracle.tol", 1e-2);
    bool ok = std::fabs(sol.y0() - expect) <= tol;
    j["oracle"] = {{"y0", expect}, {"tol", tol}, {"error", sol.y0() - expect}, {"pass", ok}};
    code = ok ? kPass : kFail;
  }
  out.write_json("solve.json", j, cfg);
  std::cout << "y0=" << sol.y0() << " se=" << sol.y0_se << "\n";
  return code;
}

int cmd_compare(const Common& c) {
  Config cfg = load_config(c);
  std::uint64_t seed = resolve_seed(cfg, c.seed, kDefaultSeed);
  Output out = make_output(c, cfg, seed);
  ComparisonSetup s;
  s.g = generator_from_config(cfg, "generator");
  s.g2 = generator_from_config(cfg, "generator2");
  s.xi = terminal_from_config(cfg, "terminal");
  s.xi2 = terminal_from_config(cfg, "terminal2");
  s.sim = sim_from_config(cfg, seed);
  s.se_mult = cfg.get_double("compare.se_mult", 3.0);
  json j;
  try {
    auto r = run_comparison(s);
    auto os = out.csv("compare.csv");
    os << "t,max_violation,se\n";
    for (std::size_t i = 0; i < r.t.size(); ++i)
      os << r.t[i] << "," << r.max_violation[i] << "," << r.se[i] << "\n";
    j = {{"pass", r.pass},
         {"worst_violation", r.worst_violation},
         {"worst_se", r.worst_se},
         {"y0", r.y0},
         {"y0_prime", r.y0_prime},
         {"certificate", r.certificate}};
    out.write_json("compare.json", j, cfg);
    std::cout << (r.pass ? "PASS" : "FAIL") << " worst_violation=" << r.worst_violation << "\n";
    return r.pass ? kPass : kFail;
  } catch (const CertificationError& e) {
    j = {{"pass", false}, {"refused", e.what()}};
    out.write_json("compare.json", j, cfg);
    std::cerr << "refused: " << e.what() << "\n";
    return kFail;
  }
}

int cmd_apriori(const Common& c) {
  Config cfg = load_config(c);
  std::uint64_t seed = resolve_seed(cfg, c.seed, kDefaultSeed);
  Output out = make_output(c, cfg, seed);
  AprioriSetup s;
  s.g = generator_from_config(cfg);
  s.xi = terminal_from_config(cfg);
  s.sim = sim_from_config(cfg, seed);
  s.n = cfg.get_double("apriori.n", 8.0);
  s.p = cfg.get_double("apriori.p", 8.0);
  if (cfg.has("apriori.eps")) s.eps = cfg.get_double("apriori.eps", 0.5);
  s.bootstrap = static_cast<int>(cfg.get_int("apriori.bootstrap", 200));
  s.se_mult = cfg.get_double("apriori.se_mult", 3.0);
  json j;
  try {
    auto r = run_apriori_bound(s);
    auto os = out.csv("apriori.csv");
    os << "t,lhs,rhs,margin,se\n";
    for (std::size_t i = 0; i < r.t.size(); ++i)
      os << r.t[i] << "," << r.lhs[i] << "," << r.rhs[i] << "," << r.margin[i] << "," << r.se[i]
         << "\n";
    j = {{"pass", r.pass},
         {"regime", regime_name(r.regime)},
         {"eps", r.eps},
         {"min_margin", r.min_margin},
         {"min_margin_se", r.min_margin_se},
         {"K", r.K},
         {"mu_T", r.mu_T},
         {"nu_T", r.nu_T},
         {"delta", r.delta},
         {"power_form", r.power_form},
         {"z_clamps", r.z_clamps},
         {"envelope_samples", r.envelope.samples}};
    out.write_json("apriori.json", j, cfg);
    std::cout << (r.pass ? "PASS" : "FAIL") << " min_margin=" << r.min_margin << "\n";
    return r.pass ? kPass : kFail;
  } catch (const CertificationError& e) {
    j = {{"pass", false}, {"refused", e.what()}};
    out.write_json("apriori.json", j, cfg);
    std::cerr << "refused: " << e.what() << "\n";
    return kFail;
  }
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"bsdelab: numerical lab for BSDEs with super-linear generators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  Common c_thr, c_ineq, c_tf, c_solve, c_cmp, c_apr;
  ThresholdArgs ta;
  auto* thr = app.add_subcommand("thresholds", "threshold curves mu, nu");
  add_common(thr, c_thr);
  thr->add_option("--beta", ta.beta);
  thr->add_option("--gamma", ta.gamma);
  thr->add_option("--lambda", ta.lambda);
  thr->add_option("--T", ta.T);
  thr->add_option("--eps", ta.eps);
  thr->add_option("--steps", ta.steps);
  thr->add_flag("--critical", ta.critical, "solve the eps -> 0 curve");
  thr->add_flag("--table", ta.table, "certificate table over thresholds.cells");

  auto* ineq = app.add_subcommand("inequality", "logarithmic Young inequality checks");
  add_common(ineq, c_ineq);
  auto* tf = app.add_subcommand("verify-testfn", "grid check of the test-function inequality");
  add_common(tf, c_tf);
  auto* solve = app.add_subcommand("solve", "solve a BSDE by regression Monte Carlo");
  add_common(solve, c_solve);
  auto* cmp = app.add_subcommand("compare", "comparison test for two BSDEs");
  add_common(cmp, c_cmp);
  auto* apr = app.add_subcommand("apriori", "a-priori bound check on a truncated member");
  add_common(apr, c_apr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (thr->parsed()) return cmd_thresholds(c_thr, ta);
    if (ineq->parsed()) return cmd_inequality(c_ineq);
    if (tf->parsed()) return cmd_verify_testfn(c_tf);
    if (solve->parsed()) return cmd_solve(c_solve);
    if (cmp->parsed()) return cmd_compare(c_cmp);
    if (apr->parsed()) return cmd_apriori(c_apr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace bsdelab
