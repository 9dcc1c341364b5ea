#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bsdelab/generators.hpp"

namespace bsdelab {

struct SimConfig {
  int d = 1;
  double T = 1.0;
  int steps = 64;
  std::size_t paths = 1u << 14;
  std::uint64_t seed = 20240611;
  int basis_degree = 6;
  int picard_iters = 20;
  double picard_tol = 1e-12;
  double z_clip = 1e3;
  // paths m and m + M/2 use opposite increments
  bool antithetic = true;

  double dt() const { return T / steps; }
  double time(int i) const { return T * i / steps; }
  // throws std::invalid_argument
  void validate() const;
};

// Time-major storage: value (m, i, j) lives at [(i d + j) M + m].
struct PathEnsemble {
  int d = 1, steps = 0;
  std::size_t paths = 0;
  double T = 1.0;
  std::uint64_t seed = 0;
  bool antithetic = false;
  std::vector<double> increments;  // i = 0..N-1
  std::vector<double> states;      // i = 0..N

  const double* state_col(int i, int j) const { return states.data() + (std::size_t(i) * d + j) * paths; }
  const double* increment_col(int i, int j) const {
    return increments.data() + (std::size_t(i) * d + j) * paths;
  }
  double state(std::size_t m, int i, int j) const { return state_col(i, j)[m]; }
  double increment(std::size_t m, int i, int j) const { return increment_col(i, j)[m]; }
};

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

PathEnsemble simulate_brownian(const SimConfig& cfg);

struct PicardError : std::runtime_error {
  int step;
  std::size_t path;
  PicardError(int step_, std::size_t path_, const std::string& what)
      : std::runtime_error(what), step(step_), path(path_) {}
};

struct StepDiagnostics {
  int step = 0;
  int degree_used = 0;
  bool fallback = false;        // singular design, degree lowered
  double fit_rms = 0.0;         // rms residual of the Y regression
  double residual_mean = 0.0;   // rms of the projected discrete BSDE residual
  int picard_max = 0;           // most iterations any path needed
  std::size_t root_fallbacks = 0;  // paths solved by bracketing after Picard stalled
};

struct BsdeSolution {
  int d = 1, steps = 0;
  std::size_t paths = 0;
  double T = 1.0;
  SimConfig config;
  std::string generator_tag, terminal_tag;
  std::optional<std::pair<double, double>> truncation;
  bool limit_construction = false;
  std::vector<double> Y;  // [i M + m], i = 0..N
  std::vector<double> Z;  // [(i d + j) M + m], i = 0..N-1; empty when dropped
  double y0_se = 0.0;
  std::size_t z_clamps = 0;
  std::vector<StepDiagnostics> diagnostics;

  double y(std::size_t m, int i) const { return Y[std::size_t(i) * paths + m]; }
  double z(std::size_t m, int i, int j) const { return Z[(std::size_t(i) * d + j) * paths + m]; }
  const double* y_col(int i) const { return Y.data() + std::size_t(i) * paths; }
  double y0() const { return Y[0]; }
  bool certifying() const { return z_clamps == 0; }
  double max_residual() const;
};

BsdeSolution solve_bsde(const GeneratorModel& g, const TerminalModel& xi, const PathEnsemble& ens,
                        const SimConfig& cfg);

// Standard error of mean(a) - mean(b) over the ensemble, antithetic pairs
// averaged first. b may be null.
double pooled_se(const double* a, const double* b, std::size_t paths, bool antithetic);

struct MonotonicityCheck {
  std::pair<double, double> from, to;  // (n, p) -> (n', p')
  double diff = 0.0;                   // Y0(to) - Y0(from)
  double se = 0.0;                     // sqrt(se_from^2 + se_to^2)
  double se_paired = 0.0;              // SE of the pathwise difference
  bool ok = true;
};

struct FamilyReport {
  std::vector<std::pair<double, double>> schedule;
  std::vector<double> y0, y0_se;
  std::vector<MonotonicityCheck> checks;
  // diagonal n = p members: |Y0(2^{j+1}) - Y0(2^j)|
  std::vector<double> diagonal_gaps;
  bool monotone() const;
};

struct FamilyOptions {
  double se_mult = 3.0;
  // keep Z only for the largest member
  bool drop_z = true;
};

struct TruncatedFamily {
  std::vector<BsdeSolution> members;
  FamilyReport report;
};

TruncatedFamily solve_truncated_family(const GeneratorModel& g, const TerminalModel& xi,
                                       const PathEnsemble& ens, const SimConfig& cfg,
                                       const std::vector<std::pair<double, double>>& schedule,
                                       const FamilyOptions& opt = {});

// n = p = 2^j, j = 0..levels-1
std::vector<std::pair<double, double>> diagonal_schedule(int levels);
std::vector<std::pair<double, double>> grid_schedule(const std::vector<double>& levels);

// Pathwise inf_p sup_n Y^{n,p}; Z from the member with the largest n p.
BsdeSolution monotone_limit(const std::vector<BsdeSolution>& family,
                            const std::vector<std::pair<double, double>>& schedule);

struct EmpiricalNorms {
  double sp_norm = 0.0, mp_norm = 0.0, class_d_proxy = 0.0;
};

// psi(x, t) supplies the class (D) functional; empty leaves the proxy at 0.
EmpiricalNorms empirical_norms(const BsdeSolution& sol, double p,
                               const std::function<double(double, double)>& psi = {});

// Columnar CSV (t, path_id, Y, Z_1..Z_d) for the first max_paths paths. A
// non-empty comment is written first as a '#' line.
void write_solution_csv(const BsdeSolution& sol, const std::string& path,
                        std::size_t max_paths = 64, const std::string& comment = {});

}  // namespace bsdelab
