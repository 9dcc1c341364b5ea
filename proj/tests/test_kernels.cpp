#include <cmath>
#include <vector>

#include "doctest.h"

#include "bsdelab/kernels.hpp"
#include "bsdelab/rng.hpp"

using namespace bsdelab;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t stream) {
  CounterStream s(11, stream);
  std::vector<double> v(n);
  for (auto& x : v) x = 3.0 * s.normal();
  return v;
}

}  // namespace

TEST_CASE("scalar kernels against naive loops") {
  const auto& k = kernels::scalar_table();
  for (std::size_t n : {0u, 1u, 3u, 17u, 1000u}) {
    auto a = random_vec(n, 1), b = random_vec(n, 2);
    double ref = 0;
    for (std::size_t i = 0; i < n; ++i) ref += a[i] * b[i];
    CHECK(k.dot(a.data(), b.data(), n) == doctest::Approx(ref).epsilon(1e-13));
    auto y = b;
    k.axpy(0.5, a.data(), y.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == 0.5 * a[i] + b[i]);
  }
}

TEST_CASE("hermite kernel: probabilists' polynomials") {
  const auto& k = kernels::scalar_table();
  std::vector<double> x{-1.5, 0.0, 0.7, 2.0};
  std::vector<double> out(5 * x.size());
  k.hermite(x.data(), 1.0, 4, out.data(), x.size(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double u = x[i];
    CHECK(out[i] == 1.0);
    CHECK(out[x.size() + i] == doctest::Approx(u));
    CHECK(out[2 * x.size() + i] == doctest::Approx(u * u - 1));
    CHECK(out[3 * x.size() + i] == doctest::Approx(u * u * u - 3 * u));
    CHECK(out[4 * x.size() + i] == doctest::Approx(u * u * u * u - 6 * u * u + 3));
  }
}

TEST_CASE("avx2 kernels match scalar") {
  const auto* v = kernels::avx2_table();
  if (!v) {
    MESSAGE("AVX2 unavailable, skipping");
    return;
  }
  const auto& s = kernels::scalar_table();
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 13u, 1024u, 4099u}) {
    auto a = random_vec(n, 3), b = random_vec(n, 4);
    double ds = s.dot(a.data(), b.data(), n), dv = v->dot(a.data(), b.data(), n);
    double mag = 0;
    for (std::size_t i = 0; i < n; ++i) mag += std::fabs(a[i] * b[i]);
    CHECK(std::fabs(ds - dv) <= 1e-13 * (1.0 + mag));

    auto y1 = b, y2 = b;
    s.axpy(-1.25, a.data(), y1.data(), n);
    v->axpy(-1.25, a.data(), y2.data(), n);
    CHECK(y1 == y2);

    std::vector<double> m1(n), m2(n);
    s.mul(a.data(), b.data(), m1.data(), n);
    v->mul(a.data(), b.data(), m2.data(), n);
    CHECK(m1 == m2);

    std::vector<double> h1(7 * n), h2(7 * n);
    s.hermite(a.data(), 0.37, 6, h1.data(), n, n);
    v->hermite(a.data(), 0.37, 6, h2.data(), n, n);
    CHECK(h1 == h2);
  }
}

TEST_CASE("kernel selection") {
  kernels::select("scalar");
  CHECK(std::string(kernels::active().name) == "scalar");
  if (kernels::cpu_has_avx2()) {
    kernels::select("avx2");
    CHECK(std::string(kernels::active().name) == "avx2");
  }
  kernels::select("auto");
  CHECK_THROWS(kernels::select("sse9"));
}
