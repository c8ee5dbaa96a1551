#include <atomic>
#include <cstdlib>
#include <string>

#include "cne/kernels.hpp"

namespace cne::kernels {

#if defined(CNE_HAVE_AVX2)
namespace detail {
const KernelTable& avx2_table();
}
#endif

const KernelTable* avx2_kernels() {
#if defined(CNE_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* initial_table() {
  if (const char* env = std::getenv("CNE_KERNELS")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_kernels();
    if (want == "avx2" && avx2_kernels()) return avx2_kernels();
  }
  if (const auto* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  if (name == "scalar") {
    current().store(&scalar_kernels(), std::memory_order_release);
    return true;
  }
  if (name == "avx2" && avx2_kernels()) {
    current().store(avx2_kernels(), std::memory_order_release);
    return true;
  }
  return false;
}

}  // namespace cne::kernels
