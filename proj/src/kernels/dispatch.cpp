#include "spectraph/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace spectraph::kernels {

namespace {

constexpr KernelTable kScalar{&scalar::squared_l2, &scalar::dot, &scalar::squared_l2_many};

#if defined(SPECTRAPH_HAVE_AVX2_KERNELS)
constexpr KernelTable kAvx2{&avx2::squared_l2, &avx2::dot, &avx2::squared_l2_many};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

Isa detect() {
  if (const char* env = std::getenv("SPECTRAPH_FORCE_SCALAR"); env && std::string(env) == "1") return Isa::scalar;
  return avx2_table() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(SPECTRAPH_HAVE_AVX2_KERNELS)
  static const bool ok = cpu_has_avx2();
  return ok ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_table()) throw std::runtime_error("AVX2 kernels are not available");
  current().store(isa, std::memory_order_relaxed);
}

const KernelTable& active() { return active_isa() == Isa::avx2 ? *avx2_table() : kScalar; }

}  // namespace spectraph::kernels
