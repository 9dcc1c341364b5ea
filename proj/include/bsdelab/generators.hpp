#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bsdelab/regime.hpp"

namespace bsdelab {

using StateSpan = std::span<const double>;
using GenFn = std::function<double(double t, StateSpan b, double y, StateSpan z)>;
using AlphaFn = std::function<double(double t, StateSpan b)>;
using TerminalFn = std::function<double(StateSpan b)>;
using ModulusFn = std::function<double(double u)>;

struct GrowthParams {
  double beta = 0.0, gamma = 0.0, lambda = 0.0;
  double delta() const { return growth_delta(lambda); }
  Regime regime() const { return regime_for_lambda(lambda); }
  // beta|y|(ln|y|)^delta 1_{|y|>1} + gamma|z||ln|z||^lambda
  double envelope(double y_abs, double z_norm) const;
};

struct AssumptionFlags {
  bool convex = false, concave = false, osgood = false, uniformly_continuous_z = false,
       lipschitz = false;
};

struct ModulusSpec {
  ModulusFn rho;    // one-sided Osgood modulus in y
  ModulusFn kappa;  // modulus of continuity in z
  double A = 1.0;   // rho(u), kappa(u) <= A(u+1)
};

struct GeneratorModel {
  std::string tag;
  GenFn eval;
  GrowthParams growth;
  AlphaFn alpha;
  AssumptionFlags flags;
  std::optional<ModulusSpec> moduli;
  // g depends on (t, b) only
  bool yz_free = false;
  // sup |g|, finite for truncated members
  double bound = std::numeric_limits<double>::infinity();

  double operator()(double t, StateSpan b, double y, StateSpan z) const { return eval(t, b, y, z); }
};

struct TerminalModel {
  std::string tag;
  TerminalFn xi;
  double operator()(StateSpan b) const { return xi(b); }
};

struct SampleRanges {
  int d = 1;
  double T = 1.0;
  double y_min = 1e-6, y_max = 1e3;  // log-uniform magnitudes, random sign
  double z_min = 1e-6, z_max = 1e3;
  double b_scale = 3.0;  // b ~ N(0, b_scale^2 I)
};

struct CheckReport {
  std::string check;
  std::size_t samples = 0;
  std::size_t violations = 0;
  std::size_t nonfinite = 0;
  double worst_excess = 0.0;  // largest lhs - rhs seen
  std::vector<double> witness;  // (t, y, |z|, ...) of the worst point
  bool pass() const { return violations == 0 && nonfinite == 0; }
};

// sgn(y) g <= alpha + envelope, sgn(0) = -1. one_sided restricts to y >= 0
// and drops the sign, i.e. the primed variant of the growth assumption.
CheckReport envelope_check(const GeneratorModel& g, std::size_t samples, const SampleRanges& r,
                           std::uint64_t seed, bool one_sided = false);

enum class Structural { UN1, UN2, UN3 };

struct StructuralReport {
  Structural which = Structural::UN1;
  std::size_t samples = 0;
  std::size_t violations = 0;          // UN1 / UN2
  std::size_t convex_violations = 0;   // UN3
  std::size_t concave_violations = 0;  // UN3
  std::size_t modulus_growth_violations = 0;  // rho, kappa <= A(u+1)
  double worst_excess = 0.0;
  std::vector<double> witness;
  bool convex() const { return convex_violations == 0; }
  bool concave() const { return concave_violations == 0; }
  bool pass() const;
};

// Throws std::invalid_argument when UN1/UN2 is requested without moduli.
StructuralReport structural_checks(const GeneratorModel& g, Structural which, std::size_t samples,
                                   const SampleRanges& r, std::uint64_t seed);

const char* structural_name(Structural s);

struct ExampleParams {
  double beta = 1.0, gamma = 1.0, lambda = 0.0, k = 1.0;
};

struct BuiltinExample {
  GeneratorModel g;
  std::vector<TerminalModel> terminals;  // suggested terminal conditions
};

const std::vector<std::string>& builtin_names();
BuiltinExample builtin_example(const std::string& name, const ExampleParams& p);

// g^{n,p} = g^+ ^ n - g^- ^ p, alpha ^ (n v p)
GeneratorModel truncate(const GeneratorModel& g, double n, double p);
TerminalModel truncate_terminal(const TerminalModel& xi, double n, double p);
double truncate_value(double v, double n, double p);

// Simple families used by configs and oracles.
GeneratorModel zero_generator();
GeneratorModel constant_generator(double c);
// a y + c + <w, z>
GeneratorModel linear_generator(double a, double c, std::vector<double> w = {});
GeneratorModel gamma_abs_z_generator(double gamma);
// |b| + shift
GeneratorModel abs_b_generator(double shift = 0.0);
GeneratorModel quadratic_y_generator(double c);
// g + c
GeneratorModel shifted_generator(const GeneratorModel& g, double c);

TerminalModel zero_terminal();
TerminalModel constant_terminal(double c);
// c b_1 + shift
TerminalModel linear_terminal(double c, double shift = 0.0);
// c |b_1|
TerminalModel abs_terminal(double c = 1.0);
// c |b|
TerminalModel norm_terminal(double c = 1.0);

double euclid_norm(StateSpan v);
std::string num_tag(double v);

}  // namespace bsdelab
