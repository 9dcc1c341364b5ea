#pragma once

#include <cstddef>
#include <cstdint>

namespace bsdelab {

struct YoungLogParams {
  double k = 2.0;
  double lambda = 1.0;
  double C = 0.0;
};

// 4^{(lambda-1)^+}
double young_power_factor(double lambda);

// 2xy|ln y|^l <= x^2 (k 4^{(l-1)+} |ln x|^{2l} + C) + y^2
bool young_log_holds(double x, double y, const YoungLogParams& p);

// (LHS - RHS without C) / x^2 written with a = y/x and L = ln x. The
// inequality fails iff this exceeds C. Stable for huge L.
double young_scaled_excess(double log_x, double a, double k, double lambda);

// f(a; k, l) = 2a 2^{(l-1)+} |ln a|^l - (1 - 1/k) a^2
double young_profile(double a, double k, double lambda);

// sup_{a>0} f(a; k, l), the smallest admissible C.
double minimal_young_constant(double k, double lambda);

struct YoungScanReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double max_scaled_excess = -1e300;  // max over samples of excess - C
  double witness_x = 0.0, witness_y = 0.0;
};

// Log-uniform random (x, y) in [lo, hi]^2.
YoungScanReport young_random_scan(const YoungLogParams& p, std::size_t samples, double lo,
                                  double hi, std::uint64_t seed);

struct SharpnessReport {
  bool violation_found = false;
  int first_j = -1;           // x = exp(2^j)
  double first_excess = 0.0;  // scaled excess minus C at first_j
  double last_excess = 0.0;   // at j_max
};

// Scan y = x |ln x|^l along x = exp(2^j), j = 1..j_max in log coordinates.
SharpnessReport young_sharpness_scan(double k, double lambda, double C, int j_max = 60);

struct SqrtLogConstant {
  double K = 0.0;       // refined supremum over the domain
  double K_grid = 0.0;  // supremum over the 1000 x 1000 log grid
  double arg_x = 0.0, arg_y = 0.0;
};

// Smallest K with 2xy sqrt|ln y| <= 2x^2 (|ln x| + K) + 3/4 y^2 on [1e-8, 1e8]^2.
SqrtLogConstant sqrt_log_constant_report();
double sqrt_log_constant();

// 2xy sqrt|ln y| - 2x^2(|ln x| + K) - 3/4 y^2
double sqrt_log_excess(double x, double y, double K);

}  // namespace bsdelab
