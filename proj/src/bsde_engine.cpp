#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "bsdelab/bsde_engine.hpp"
#include "bsdelab/kernels.hpp"
#include "bsdelab/rng.hpp"

namespace bsdelab {

void SimConfig::validate() const {
  auto bad = [](const std::string& m) { throw std::invalid_argument("SimConfig: " + m); };
  if (d < 1 || d > 2) bad("d must be 1 or 2");
  if (!(T > 0.0) || !std::isfinite(T)) bad("T must be positive");
  if (steps < 2) bad("steps >= 2 required");
  if (paths < 100) bad("paths >= 100 required");
  if (antithetic && paths % 2 != 0) bad("antithetic sampling needs an even path count");
  if (basis_degree < 0 || basis_degree > 10) bad("basis_degree in [0, 10]");
  if (picard_iters < 1) bad("picard_iters >= 1 required");
  if (!(z_clip > 0.0) || !std::isfinite(z_clip)) bad("z_clip must be finite and positive");
}

namespace {

// Root of F near x0 by outward doubling and bisection; F(x0) has the sign of -g.
std::optional<double> bracket_root(const std::function<double(double)>& F, double x0, double tol) {
  double f0 = F(x0);
  if (f0 == 0.0) return x0;
  double dir = f0 < 0.0 ? 1.0 : -1.0;
  double lo = x0, step = 1e-8 * (1.0 + std::fabs(x0));
  double hi = x0, fhi = f0;
  for (int k = 0; k < 200; ++k) {
    hi = x0 + dir * step;
    fhi = F(hi);
    if (!std::isfinite(fhi)) return std::nullopt;
    if ((fhi > 0.0) != (f0 > 0.0)) break;
    lo = hi;
    step *= 2.0;
    if (k == 199) return std::nullopt;
  }
  double flo = F(lo);
  for (int k = 0; k < 200; ++k) {
    double mid = 0.5 * (lo + hi);
    double fm = F(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (std::fabs(hi - lo) <= tol * (1.0 + std::fabs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PathEnsemble simulate_brownian(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t M = cfg.paths, N = cfg.steps, d = cfg.d;
  constexpr std::size_t kMaxDoubles = std::size_t(1) << 29;
  if (M > kMaxDoubles / (N + 1) / d) throw ResourceError("ensemble M x N x d too large");

  PathEnsemble e;
  e.d = cfg.d;
  e.steps = cfg.steps;
  e.paths = M;
  e.T = cfg.T;
  e.seed = cfg.seed;
  e.antithetic = cfg.antithetic;
  e.increments.assign(M * N * d, 0.0);
  e.states.assign(M * (N + 1) * d, 0.0);

  const double sd = std::sqrt(cfg.dt());
  const std::size_t streams = cfg.antithetic ? M / 2 : M;
  for (std::size_t k = 0; k < streams; ++k) {
    CounterStream rng(cfg.seed, k);
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double x = sd * rng.normal();
        e.increments[(i * d + j) * M + k] = x;
        if (cfg.antithetic) e.increments[(i * d + j) * M + k + streams] = -x;
      }
    }
  }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double* prev = e.states.data() + (i * d + j) * M;
      const double* inc = e.increments.data() + (i * d + j) * M;
      double* next = e.states.data() + ((i + 1) * d + j) * M;
      for (std::size_t m = 0; m < M; ++m) next[m] = prev[m] + inc[m];
    }
  return e;
}

namespace {

// Design matrix, column-major: column a at [a M].
struct Design {
  std::size_t M = 0;
  int K = 0;
  std::vector<double> X;
  const double* col(int a) const { return X.data() + std::size_t(a) * M; }
};

int basis_size(int d, int degree) {
  return d == 1 ? degree + 1 : (degree + 1) * (degree + 2) / 2;
}

Design build_design(const PathEnsemble& ens, int i, int degree) {
  const auto& K = kernels::active();
  Design D;
  D.M = ens.paths;
  D.K = basis_size(ens.d, degree);
  D.X.resize(std::size_t(D.K) * D.M);
  double t = ens.T * i / ens.steps;
  double scale = t > 0.0 ? 1.0 / std::sqrt(t) : 0.0;
  if (ens.d == 1) {
    K.hermite(ens.state_col(i, 0), scale, degree, D.X.data(), D.M, D.M);
    return D;
  }
  std::vector<double> H1(std::size_t(degree + 1) * D.M), H2(H1.size());
  K.hermite(ens.state_col(i, 0), scale, degree, H1.data(), D.M, D.M);
  K.hermite(ens.state_col(i, 1), scale, degree, H2.data(), D.M, D.M);
  int c = 0;
  for (int tot = 0; tot <= degree; ++tot)
    for (int a = tot; a >= 0; --a) {
      int b = tot - a;
      K.mul(H1.data() + std::size_t(a) * D.M, H2.data() + std::size_t(b) * D.M,
            D.X.data() + std::size_t(c++) * D.M, D.M);
    }
  return D;
}

struct Projector {
  Design D;
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
  Eigen::MatrixXd G;

  bool factor() {
    const auto& K = kernels::active();
    G.resize(D.K, D.K);
    for (int a = 0; a < D.K; ++a)
      for (int b = a; b < D.K; ++b) {
        double v = K.dot(D.col(a), D.col(b), D.M) / D.M;
        G(a, b) = v;
        G(b, a) = v;
      }
    ldlt.compute(G);
    if (ldlt.info() != Eigen::Success) return false;
    auto piv = ldlt.vectorD();
    double hi = piv.cwiseAbs().maxCoeff(), lo = piv.minCoeff();
    return lo > 1e-12 * hi;
  }

  Eigen::VectorXd rhs(const double* r) const {
    const auto& K = kernels::active();
    Eigen::VectorXd b(D.K);
    for (int a = 0; a < D.K; ++a) b(a) = K.dot(D.col(a), r, D.M) / D.M;
    return b;
  }

  Eigen::VectorXd coeffs(const double* r) const { return ldlt.solve(rhs(r)); }

  void fitted(const Eigen::VectorXd& c, double* out) const {
    const auto& K = kernels::active();
    std::fill(out, out + D.M, 0.0);
    for (int a = 0; a < D.K; ++a) K.axpy(c(a), D.col(a), out, D.M);
  }

  // rms over paths of the projection of r onto the basis
  double projected_rms(const double* r) const {
    Eigen::VectorXd b = rhs(r);
    Eigen::VectorXd c = ldlt.solve(b);
    return std::sqrt(std::max(0.0, c.dot(b)));
  }
};

Projector make_projector(const PathEnsemble& ens, int i, int degree, bool& fallback,
                         int& used) {
  fallback = false;
  for (int deg = degree; deg >= 0; --deg) {
    Projector P;
    P.D = build_design(ens, i, deg);
    if (P.factor()) {
      used = deg;
      return P;
    }
    fallback = true;
  }
  throw std::runtime_error("regression design singular at step " + std::to_string(i));
}

}  // namespace

double BsdeSolution::max_residual() const {
  double r = 0.0;
  for (const auto& s : diagnostics) r = std::max(r, s.residual_mean);
  return r;
}

double pooled_se(const double* a, const double* b, std::size_t paths, bool antithetic) {
  std::size_t n = antithetic ? paths / 2 : paths;
  auto val = [&](std::size_t k) {
    double v = a[k] - (b ? b[k] : 0.0);
    if (!antithetic) return v;
    double w = a[k + n] - (b ? b[k + n] : 0.0);
    return 0.5 * (v + w);
  };
  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) mean += val(k);
  mean /= n;
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double e = val(k) - mean;
    ss += e * e;
  }
  return std::sqrt(ss / (n - 1) / n);
}

BsdeSolution solve_bsde(const GeneratorModel& g, const TerminalModel& xi, const PathEnsemble& ens,
                        const SimConfig& cfg) {
  cfg.validate();
  if (ens.paths != cfg.paths || ens.steps != cfg.steps || ens.d != cfg.d || ens.T != cfg.T)
    throw std::invalid_argument("solve_bsde: ensemble does not match config");
  const std::size_t M = ens.paths;
  const int N = ens.steps, d = ens.d;
  const double dt = cfg.dt();

  BsdeSolution sol;
  sol.d = d;
  sol.steps = N;
  sol.paths = M;
  sol.T = cfg.T;
  sol.config = cfg;
  sol.generator_tag = g.tag;
  sol.terminal_tag = xi.tag;
  sol.Y.assign(M * (N + 1), 0.0);
  sol.Z.assign(M * N * d, 0.0);
  sol.diagnostics.resize(N);

  std::vector<double> b(d), z(d);
  double* YN = sol.Y.data() + std::size_t(N) * M;
  for (std::size_t m = 0; m < M; ++m) {
    for (int j = 0; j < d; ++j) b[j] = ens.state(m, N, j);
    YN[m] = xi(b);
    if (!std::isfinite(YN[m])) throw std::runtime_error("terminal value not finite");
  }

  const auto& K = kernels::active();
  std::vector<double> prod(M), ey(M), gv(M), resid(M), centred(M);
  for (int i = N - 1; i >= 0; --i) {
    auto& diag = sol.diagnostics[i];
    diag.step = i;
    int deg = i == 0 ? 0 : cfg.basis_degree;
    Projector P = make_projector(ens, i, deg, diag.fallback, diag.degree_used);
    const double* Ynext = sol.y_col(i + 1);
    double* Yi = sol.Y.data() + std::size_t(i) * M;

    Eigen::VectorXd cy = P.coeffs(Ynext);
    P.fitted(cy, ey.data());
    double fr = 0.0;
    for (std::size_t m = 0; m < M; ++m) fr += (Ynext[m] - ey[m]) * (Ynext[m] - ey[m]);
    diag.fit_rms = std::sqrt(fr / M);

    for (std::size_t m = 0; m < M; ++m) centred[m] = Ynext[m] - ey[m];
    for (int j = 0; j < d; ++j) {
      K.mul(centred.data(), ens.increment_col(i, j), prod.data(), M);
      Eigen::VectorXd cz = P.coeffs(prod.data()) / dt;
      double* Zij = sol.Z.data() + (std::size_t(i) * d + j) * M;
      P.fitted(cz, Zij);
      for (std::size_t m = 0; m < M; ++m) {
        if (Zij[m] > cfg.z_clip) {
          Zij[m] = cfg.z_clip;
          ++sol.z_clamps;
        } else if (Zij[m] < -cfg.z_clip) {
          Zij[m] = -cfg.z_clip;
          ++sol.z_clamps;
        }
      }
    }

    const double t = cfg.time(i);
    for (std::size_t m = 0; m < M; ++m) {
      for (int j = 0; j < d; ++j) {
        b[j] = ens.state(m, i, j);
        z[j] = sol.z(m, i, j);
      }
      double y = ey[m], gy = 0.0;
      int it = 0;
      bool done = false;
      for (; it < cfg.picard_iters; ++it) {
        gy = g(t, b, y, z);
        double next = ey[m] + gy * dt;
        if (!std::isfinite(next))
          throw PicardError(i, m, "Picard iterate not finite at step " + std::to_string(i));
        double change = std::fabs(next - y);
        y = next;
        if (change <= cfg.picard_tol * (1.0 + std::fabs(y))) {
          done = true;
          break;
        }
      }
      if (!done) {
        auto F = [&](double v) { return v - ey[m] - dt * g(t, b, v, z); };
        auto root = bracket_root(F, ey[m], cfg.picard_tol);
        if (!root)
          throw PicardError(i, m,
                            "Picard iteration did not converge at step " + std::to_string(i) +
                                ", path " + std::to_string(m));
        y = *root;
        ++diag.root_fallbacks;
      }
      diag.picard_max = std::max(diag.picard_max, it + 1);
      Yi[m] = y;
      gv[m] = g(t, b, y, z);
    }

    for (std::size_t m = 0; m < M; ++m) {
      double zdb = 0.0;
      for (int j = 0; j < d; ++j) zdb += sol.z(m, i, j) * ens.increment(m, i, j);
      resid[m] = Yi[m] - Ynext[m] - gv[m] * dt + zdb;
    }
    diag.residual_mean = P.projected_rms(resid.data());
  }
  sol.y0_se = pooled_se(sol.y_col(1), nullptr, M, cfg.antithetic);
  return sol;
}

std::vector<std::pair<double, double>> diagonal_schedule(int levels) {
  std::vector<std::pair<double, double>> s;
  for (int j = 0; j < levels; ++j) s.emplace_back(std::ldexp(1.0, j), std::ldexp(1.0, j));
  return s;
}

std::vector<std::pair<double, double>> grid_schedule(const std::vector<double>& levels) {
  std::vector<std::pair<double, double>> s;
  for (double p : levels)
    for (double n : levels) s.emplace_back(n, p);
  return s;
}

bool FamilyReport::monotone() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.ok; });
}

TruncatedFamily solve_truncated_family(const GeneratorModel& g, const TerminalModel& xi,
                                       const PathEnsemble& ens, const SimConfig& cfg,
                                       const std::vector<std::pair<double, double>>& schedule,
                                       const FamilyOptions& opt) {
  if (schedule.empty()) throw std::invalid_argument("solve_truncated_family: empty schedule");
  TruncatedFamily fam;
  auto& rep = fam.report;
  rep.schedule = schedule;
  std::size_t largest = 0;
  for (std::size_t k = 0; k < schedule.size(); ++k)
    if (schedule[k].first * schedule[k].second >
        schedule[largest].first * schedule[largest].second)
      largest = k;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    auto [n, p] = schedule[k];
    BsdeSolution s = solve_bsde(truncate(g, n, p), truncate_terminal(xi, n, p), ens, cfg);
    s.truncation = schedule[k];
    if (opt.drop_z && k != largest) {
      s.Z.clear();
      s.Z.shrink_to_fit();
    }
    rep.y0.push_back(s.y0());
    rep.y0_se.push_back(s.y0_se);
    fam.members.push_back(std::move(s));
  }

  std::map<std::pair<double, double>, std::size_t> at;
  for (std::size_t k = 0; k < schedule.size(); ++k) at[schedule[k]] = k;
  auto compare = [&](std::size_t a, std::size_t b, bool increasing) {
    MonotonicityCheck c;
    c.from = schedule[a];
    c.to = schedule[b];
    c.diff = rep.y0[b] - rep.y0[a];
    c.se = std::hypot(rep.y0_se[a], rep.y0_se[b]);
    c.se_paired = pooled_se(fam.members[b].y_col(1), fam.members[a].y_col(1), ens.paths,
                            cfg.antithetic);
    c.ok = increasing ? c.diff >= -opt.se_mult * c.se : c.diff <= opt.se_mult * c.se;
    rep.checks.push_back(c);
  };
  // neighbours in n at fixed p (Y up) and in p at fixed n (Y down)
  for (auto it = at.begin(); it != at.end(); ++it) {
    auto [n, p] = it->first;
    std::optional<std::size_t> next_n, next_p;
    for (auto& [key, idx] : at) {
      if (key.second == p && key.first > n &&
          (!next_n || key.first < schedule[*next_n].first))
        next_n = idx;
      if (key.first == n && key.second > p &&
          (!next_p || key.second < schedule[*next_p].second))
        next_p = idx;
    }
    if (next_n) compare(it->second, *next_n, true);
    if (next_p) compare(it->second, *next_p, false);
  }
  std::vector<std::pair<double, double>> diag;
  for (auto& [key, idx] : at)
    if (key.first == key.second) diag.push_back({key.first, rep.y0[idx]});
  for (std::size_t k = 1; k < diag.size(); ++k)
    rep.diagonal_gaps.push_back(std::fabs(diag[k].second - diag[k - 1].second));
  return fam;
}

BsdeSolution monotone_limit(const std::vector<BsdeSolution>& family,
                            const std::vector<std::pair<double, double>>& schedule) {
  if (family.empty() || family.size() != schedule.size())
    throw std::invalid_argument("monotone_limit: family and schedule differ in size");
  const auto& f0 = family.front();
  for (const auto& s : family)
    if (s.paths != f0.paths || s.steps != f0.steps || s.d != f0.d ||
        s.config.seed != f0.config.seed || s.T != f0.T)
      throw std::invalid_argument("monotone_limit: members use different ensembles");

  std::map<double, std::vector<std::size_t>> by_p;
  std::map<double, std::set<double>> ns;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    by_p[schedule[k].second].push_back(k);
    ns[schedule[k].second].insert(schedule[k].first);
  }
  for (auto& [p, set] : ns)
    if (set != ns.begin()->second)
      throw std::invalid_argument("monotone_limit: schedule is not a grid in (n, p)");

  std::size_t largest = 0;
  for (std::size_t k = 0; k < schedule.size(); ++k)
    if (schedule[k].first * schedule[k].second >
        schedule[largest].first * schedule[largest].second)
      largest = k;

  BsdeSolution out = family[largest];
  out.limit_construction = true;
  out.truncation.reset();
  out.diagnostics.clear();
  const std::size_t total = out.Y.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    double inf_p = std::numeric_limits<double>::infinity();
    for (auto& [p, members] : by_p) {
      double sup_n = -std::numeric_limits<double>::infinity();
      for (std::size_t k : members) sup_n = std::max(sup_n, family[k].Y[idx]);
      inf_p = std::min(inf_p, sup_n);
    }
    out.Y[idx] = inf_p;
  }
  out.y0_se = 0.0;
  for (std::size_t k = 0; k < family.size(); ++k) out.y0_se = std::max(out.y0_se, family[k].y0_se);
  return out;
}

EmpiricalNorms empirical_norms(const BsdeSolution& sol, double p,
                               const std::function<double(double, double)>& psi) {
  if (!(p >= 1.0)) throw std::invalid_argument("empirical_norms: p >= 1 required");
  EmpiricalNorms r;
  const std::size_t M = sol.paths;
  const int N = sol.steps;
  const double dt = sol.T / N;
  double sp = 0.0, mp = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    double mx = 0.0;
    for (int i = 0; i <= N; ++i) mx = std::max(mx, std::fabs(sol.y(m, i)));
    sp += std::pow(mx, p);
    if (!sol.Z.empty()) {
      double q = 0.0;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < sol.d; ++j) q += sol.z(m, i, j) * sol.z(m, i, j) * dt;
      mp += std::pow(q, p / 2.0);
    }
  }
  r.sp_norm = std::pow(sp / M, 1.0 / p);
  r.mp_norm = std::pow(mp / M, 1.0 / p);
  if (psi) {
    for (int i = 0; i <= N; ++i) {
      double t = sol.T * i / N, s = 0.0;
      const double* y = sol.y_col(i);
      for (std::size_t m = 0; m < M; ++m) s += psi(std::fabs(y[m]), t);
      r.class_d_proxy = std::max(r.class_d_proxy, s / M);
    }
  }
  return r;
}

void write_solution_csv(const BsdeSolution& sol, const std::string& path, std::size_t max_paths,
                        const std::string& comment) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.precision(17);
  if (!comment.empty()) os << "# " << comment << "\n";
  os << "t,path_id,Y";
  for (int j = 0; j < sol.d; ++j) os << ",Z" << j + 1;
  os << "\n";
  std::size_t P = std::min(max_paths, sol.paths);
  for (int i = 0; i <= sol.steps; ++i) {
    double t = sol.T * i / sol.steps;
    for (std::size_t m = 0; m < P; ++m) {
      os << t << "," << m << "," << sol.y(m, i);
      for (int j = 0; j < sol.d; ++j) {
        if (i < sol.steps && !sol.Z.empty())
          os << "," << sol.z(m, i, j);
        else
          os << ",";
      }
      os << "\n";
    }
  }
}

}  // namespace bsdelab
