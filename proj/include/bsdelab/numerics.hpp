#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace bsdelab::num {

using ScalarFn = std::function<double(double)>;

struct Extremum {
  double arg = 0.0;
  double value = 0.0;
};

// Golden-section search for a maximum of a unimodal f on [lo, hi].
Extremum golden_max(const ScalarFn& f, double lo, double hi, double xtol = 1e-14,
                    int max_iter = 500);

// Global maximum over [lo, hi]: uniform grid, then golden refinement of the
// best few grid peaks on their neighbouring cells.
Extremum grid_golden_max(const ScalarFn& f, double lo, double hi, int grid = 10000,
                         int peaks = 4);

inline Extremum grid_golden_min(const ScalarFn& f, double lo, double hi, int grid = 10000) {
  auto r = grid_golden_max([&](double x) { return -f(x); }, lo, hi, grid);
  return {r.arg, -r.value};
}

// Bisection on a sign change of f over [lo, hi].
double bisect(const ScalarFn& f, double lo, double hi, double xtol, int max_iter = 300);

std::vector<double> linspace(double lo, double hi, std::size_t n);
std::vector<double> logspace(double lo, double hi, std::size_t n);

// Cubic Hermite interpolation on [x0, x1].
double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x);
double hermite_slope(double x0, double x1, double y0, double y1, double d0, double d1,
                     double x);

// Composite Simpson on a uniform grid with an even number of intervals;
// a trailing odd interval falls back to the trapezoid rule. Returns the
// running integral at every node.
std::vector<double> cumulative_simpson(const std::vector<double>& f, double h);

double log_add_exp(double a, double b);

}  // namespace bsdelab::num
