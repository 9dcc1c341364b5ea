#include "bsdelab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bsdelab::num {

Extremum golden_max(const ScalarFn& f, double lo, double hi, double xtol, int max_iter) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > xtol * (1.0 + std::fabs(a) + std::fabs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  Extremum best{c, fc};
  if (fd > best.value) best = {d, fd};
  for (double e : {lo, hi}) {
    double fe = f(e);
    if (fe > best.value) best = {e, fe};
  }
  return best;
}

Extremum grid_golden_max(const ScalarFn& f, double lo, double hi, int grid, int peaks) {
  if (!(hi > lo) || grid < 3) throw std::invalid_argument("grid_golden_max: bad interval");
  std::vector<double> xs(grid), fs(grid);
  const double h = (hi - lo) / (grid - 1);
  for (int i = 0; i < grid; ++i) {
    xs[i] = lo + h * i;
    fs[i] = f(xs[i]);
  }
  // local maxima of the sampled profile, best first
  std::vector<int> cand;
  for (int i = 0; i < grid; ++i) {
    double left = i > 0 ? fs[i - 1] : -INFINITY;
    double right = i + 1 < grid ? fs[i + 1] : -INFINITY;
    if (fs[i] >= left && fs[i] >= right) cand.push_back(i);
  }
  std::sort(cand.begin(), cand.end(), [&](int a, int b) { return fs[a] > fs[b]; });
  if (static_cast<int>(cand.size()) > peaks) cand.resize(peaks);

  Extremum best{xs[0], fs[0]};
  for (int i = 0; i < grid; ++i)
    if (fs[i] > best.value) best = {xs[i], fs[i]};
  for (int i : cand) {
    double a = xs[std::max(0, i - 1)];
    double b = xs[std::min(grid - 1, i + 1)];
    auto r = golden_max(f, a, b);
    if (r.value > best.value) best = r;
  }
  return best;
}

double bisect(const ScalarFn& f, double lo, double hi, double xtol, int max_iter) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw std::invalid_argument("bisect: no sign change");
  for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * double(i) / double(n - 1);
  v.back() = hi;
  return v;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  auto u = linspace(std::log(lo), std::log(hi), n);
  for (auto& x : u) x = std::exp(x);
  if (n > 0) {
    u.front() = lo;
    u.back() = hi;
  }
  return u;
}

double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
  double h = x1 - x0;
  double t = (x - x0) / h;
  double t2 = t * t, t3 = t2 * t;
  double h00 = 2 * t3 - 3 * t2 + 1;
  double h10 = t3 - 2 * t2 + t;
  double h01 = -2 * t3 + 3 * t2;
  double h11 = t3 - t2;
  return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
}

double hermite_slope(double x0, double x1, double y0, double y1, double d0, double d1,
                     double x) {
  double h = x1 - x0;
  double t = (x - x0) / h;
  double t2 = t * t;
  double g00 = 6 * t2 - 6 * t;
  double g10 = 3 * t2 - 4 * t + 1;
  double g01 = -6 * t2 + 6 * t;
  double g11 = 3 * t2 - 2 * t;
  return (g00 * y0 + g01 * y1) / h + g10 * d0 + g11 * d1;
}

std::vector<double> cumulative_simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n == 2) {
    out[1] = 0.5 * h * (f[0] + f[1]);
    return out;
  }
  for (std::size_t i = 2; i < n; i += 2)
    out[i] = out[i - 2] + h / 3.0 * (f[i - 2] + 4 * f[i - 1] + f[i]);
  for (std::size_t i = 1; i < n; i += 2) {
    if (i + 1 < n)
      out[i] = out[i - 1] + h / 12.0 * (5 * f[i - 1] + 8 * f[i] - f[i + 1]);
    else
      out[i] = out[i - 1] + h / 12.0 * (-f[i - 2] + 8 * f[i - 1] + 5 * f[i]);
  }
  return out;
}

double log_add_exp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

}  // namespace bsdelab::num
