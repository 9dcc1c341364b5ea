#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsdelab/bsde_engine.hpp"
#include "bsdelab/config.hpp"
#include "bsdelab/generators.hpp"
#include "bsdelab/test_functions.hpp"

namespace bsdelab {

// Raised when a precondition certificate fails; the experiment refuses to certify.
struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- config ingestion ------------------------------------------------------

// [section] name = ex4.8 | zero | constant | linear | gamma-abs-z | abs-b | quadratic-y
GeneratorModel generator_from_config(const Config& cfg, const std::string& section = "generator");
// [section] kind = zero | constant | linear | abs | norm
TerminalModel terminal_from_config(const Config& cfg, const std::string& section = "terminal");
SimConfig sim_from_config(const Config& cfg, std::uint64_t seed);

// Default epsilon per regime: 0, 1/2, gamma/2, 1/2.
double default_eps(Regime r, double gamma);

// ---- a-priori bound --------------------------------------------------------

struct AprioriSetup {
  GeneratorModel g;
  TerminalModel xi;
  SimConfig sim;
  double n = 8.0, p = 8.0;
  std::optional<double> eps;
  int bootstrap = 200;
  double se_mult = 3.0;
  std::size_t envelope_samples = 100000;
};

struct BoundReport {
  Regime regime = Regime::LambdaZero;
  double eps = 0.0;
  std::vector<double> t, lhs, rhs, margin, se;
  double min_margin = 0.0, min_margin_se = 0.0;
  std::size_t argmin = 0;
  // constants
  bool power_form = false;
  double K = 0.0, mu_T = 0.0, nu_T = 0.0, delta = 0.0;
  // certificates
  CheckReport envelope;
  std::size_t z_clamps = 0;
  bool pass = false;
};

// Throws CertificationError when the envelope check of the regime fails.
BoundReport run_apriori_bound(const AprioriSetup& setup);

// ---- comparison --------------------------------------------------------------

struct ComparisonSetup {
  GeneratorModel g, g2;
  TerminalModel xi, xi2;
  SimConfig sim;
  double se_mult = 3.0;
  std::size_t certificate_samples = 100000;
};

struct ComparisonReport {
  std::vector<double> t, max_violation, se;
  double worst_violation = 0.0, worst_se = 0.0;
  std::size_t worst_step = 0;
  double y0 = 0.0, y0_prime = 0.0;
  bool terminal_ordered = false;   // xi <= xi' on the ensemble
  bool generator_ordered = false;  // g <= g' along the primed solution
  std::string certificate;         // "UN1+UN2", "UN3" or "none"
  bool pass = false;
};

// Throws CertificationError when a precondition fails.
ComparisonReport run_comparison(const ComparisonSetup& setup);

// ---- threshold table ---------------------------------------------------------

struct ThresholdCell {
  double beta = 0, gamma = 0, lambda = 0;
};

struct ThresholdRow {
  ThresholdCell cell;
  Regime regime = Regime::LambdaZero;
  double mu_critical = 0.0;
  std::optional<double> closed_form;
  double mu_certificate = 0.0;  // factor * mu_critical
  double estimate = 0.0, se = 0.0;
  bool pass = false;
};

struct ThresholdTableSetup {
  std::vector<ThresholdCell> cells;
  double T = 1.0;
  double factor = 1.05;
  TerminalModel xi = abs_terminal(1.0);
  AlphaFn alpha;  // empty means alpha = 0
  SimConfig sim;
  double max_rel_se = 0.05;
};

std::vector<ThresholdRow> run_threshold_table(const ThresholdTableSetup& setup);

// E[psi(x, mu)] in the regime's integrability form
double regime_integrand(Regime r, double lambda, double mu, double x);

// ---- CLI -----------------------------------------------------------------------

int cli_main(int argc, char** argv);

}  // namespace bsdelab
