#pragma once

#include <cstddef>
#include <string>

namespace bsdelab::kernels {

// Hot loops of the regression step. Every table computes the same
// quantities; the scalar table is the reference.
struct KernelTable {
  const char* name;
  // sum_i a[i] b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += a x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out[k * stride + i] = He_k(scale * x[i]), k = 0..degree
  void (*hermite)(const double* x, double scale, int degree, double* out, std::size_t n,
                  std::size_t stride);
  // out[i] = a[i] * b[i]
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the build or the CPU lacks AVX2+FMA
const KernelTable* avx2_table();

bool cpu_has_avx2();

// Table chosen by BSDELAB_KERNEL=scalar|avx2|auto (default auto).
const KernelTable& active();
// Overrides the environment; "auto" restores it. Throws on unknown or
// unavailable names.
void select(const std::string& name);

}  // namespace bsdelab::kernels
