#include <atomic>
#include <cstdlib>
#include <string_view>

#include "liftkit/simd/kernels.hpp"

namespace liftkit::simd {
namespace {

const KernelTable* best_available() {
  if (const KernelTable* t = avx2_kernels(); t != nullptr && cpu_has_avx2()) return t;
  if (const KernelTable* t = neon_kernels(); t != nullptr) return t;
  return &scalar_kernels();
}

const KernelTable* lookup(std::string_view name) {
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2") return cpu_has_avx2() ? avx2_kernels() : nullptr;
  if (name == "neon") return neon_kernels();
  if (name == "auto" || name.empty()) return best_available();
  return nullptr;
}

const KernelTable* initial() {
  if (const char* env = std::getenv("LIFTKIT_SIMD")) {
    if (const KernelTable* t = lookup(env)) return t;
  }
  return best_available();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial()};
  return table;
}

}  // namespace

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

bool select(std::string_view name) {
  const KernelTable* t = lookup(name);
  if (t == nullptr) return false;
  current().store(t, std::memory_order_relaxed);
  return true;
}

}  // namespace liftkit::simd
