#include "bsdelab/kernels.hpp"

namespace bsdelab::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void hermite_scalar(const double* x, double scale, int degree, double* out, std::size_t n,
                    std::size_t stride) {
  for (std::size_t i = 0; i < n; ++i) {
    double u = scale * x[i];
    double h0 = 1.0, h1 = u;
    out[i] = 1.0;
    if (degree >= 1) out[stride + i] = u;
    for (int k = 1; k < degree; ++k) {
      double h2 = u * h1 - k * h0;
      out[(k + 1) * stride + i] = h2;
      h0 = h1;
      h1 = h2;
    }
  }
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

const KernelTable kScalar{"scalar", dot_scalar, axpy_scalar, hermite_scalar, mul_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace bsdelab::kernels
