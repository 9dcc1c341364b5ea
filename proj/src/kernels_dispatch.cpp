#include <cstdlib>
#include <stdexcept>

#include "bsdelab/kernels.hpp"

namespace bsdelab::kernels {

bool cpu_has_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable* resolve(const std::string& name) {
  if (name == "scalar") return &scalar_table();
  if (name == "avx2") {
    const KernelTable* t = avx2_table();
    if (!t) throw std::runtime_error("kernel avx2 unavailable on this machine");
    return t;
  }
  if (name.empty() || name == "auto") {
    const KernelTable* t = avx2_table();
    return t ? t : &scalar_table();
  }
  throw std::invalid_argument("unknown kernel: " + name);
}

const KernelTable* from_env() {
  const char* e = std::getenv("BSDELAB_KERNEL");
  return resolve(e ? e : "auto");
}

const KernelTable*& current() {
  static const KernelTable* t = from_env();
  return t;
}

}  // namespace

const KernelTable& active() { return *current(); }

void select(const std::string& name) {
  current() = name == "auto" ? from_env() : resolve(name);
}

}  // namespace bsdelab::kernels
