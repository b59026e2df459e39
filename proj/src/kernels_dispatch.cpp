#include <atomic>

#include "flagein/kernels.hpp"

namespace flagein {

#if defined(FLAGEIN_HAVE_AVX2_BUILD)
namespace detail {
const KernelOps& avx2_kernel_table();
}
#endif

bool cpu_has_avx2() {
#if defined(FLAGEIN_HAVE_AVX2_BUILD) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelOps* avx2_kernels() {
#if defined(FLAGEIN_HAVE_AVX2_BUILD)
  if (cpu_has_avx2()) return &detail::avx2_kernel_table();
#endif
  return nullptr;
}

namespace {

std::atomic<const KernelOps*> g_active{nullptr};

const KernelOps* best_kernels() {
  if (const KernelOps* avx2 = avx2_kernels()) return avx2;
  return &scalar_kernels();
}

}  // namespace

const KernelOps& active_kernels() {
  const KernelOps* ops = g_active.load(std::memory_order_acquire);
  if (ops == nullptr) {
    ops = best_kernels();
    g_active.store(ops, std::memory_order_release);
  }
  return *ops;
}

bool select_kernels(std::string_view name) {
  if (name == "auto") {
    g_active.store(best_kernels(), std::memory_order_release);
    return true;
  }
  if (name == "scalar") {
    g_active.store(&scalar_kernels(), std::memory_order_release);
    return true;
  }
  if (name == "avx2") {
    if (const KernelOps* avx2 = avx2_kernels()) {
      g_active.store(avx2, std::memory_order_release);
      return true;
    }
    return false;
  }
  return false;
}

}  // namespace flagein
