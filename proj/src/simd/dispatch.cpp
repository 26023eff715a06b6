#include <atomic>
#include <cstdlib>
#include <string>

#include "geoknit/error.hpp"
#include "geoknit/simd/kernels.hpp"

namespace geoknit::simd {

#ifndef GEOKNIT_HAVE_AVX2_KERNELS
const KernelTable* avx2_kernels() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

bool avx2_usable() { return avx2_kernels() != nullptr && cpu_has_avx2(); }

Isa detect() {
  if (const char* env = std::getenv("GEOKNIT_SIMD")) {
    if (std::string(env) == "scalar") return Isa::scalar;
  }
  return avx2_usable() ? Isa::avx2 : Isa::scalar;
}

std::atomic<int>& current() {
  static std::atomic<int> isa{static_cast<int>(detect())};
  return isa;
}

}  // namespace

Isa active_isa() { return static_cast<Isa>(current().load(std::memory_order_relaxed)); }

const KernelTable& kernels() { return active_isa() == Isa::avx2 ? *avx2_kernels() : scalar_kernels(); }

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_usable()) throw Error("isa-unavailable", "AVX2 kernels not available");
  current().store(static_cast<int>(isa), std::memory_order_relaxed);
}

}  // namespace geoknit::simd
