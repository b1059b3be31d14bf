#include <cstdlib>
#include <string_view>

#include "btcmine/kernels.hpp"

namespace btcmine::kernels {

namespace {

constexpr KernelTable kScalar{Backend::scalar, detail::sum_scalar, detail::dot_scalar,
                              detail::centered_dot_scalar, detail::axpy_scalar};

#if defined(BTCMINE_HAVE_AVX2)
constexpr KernelTable kAvx2{Backend::avx2, detail::sum_avx2, detail::dot_avx2,
                            detail::centered_dot_avx2, detail::axpy_avx2};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

#if defined(BTCMINE_HAVE_NEON)
constexpr KernelTable kNeon{Backend::neon, detail::sum_neon, detail::dot_neon,
                            detail::centered_dot_neon, detail::axpy_neon};
#endif

const KernelTable& resolve() {
  const char* forced = std::getenv("BTCMINE_KERNELS");
  std::string_view want = forced ? forced : "";
  if (want == "scalar") return kScalar;
  if (want == "avx2" || want == "neon" || want.empty() || want == "auto") {
    const Backend order[] = {Backend::avx2, Backend::neon};
    for (Backend b : order) {
      if (!want.empty() && want != "auto" && want != backend_name(b)) continue;
      if (const KernelTable* t = table_for(b)) return *t;
    }
  }
  return kScalar;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* table_for(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return &kScalar;
    case Backend::avx2:
#if defined(BTCMINE_HAVE_AVX2)
      return cpu_has_avx2() ? &kAvx2 : nullptr;
#else
      return nullptr;
#endif
    case Backend::neon:
#if defined(BTCMINE_HAVE_NEON)
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& active() {
  static const KernelTable& table = resolve();
  return table;
}

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

}  // namespace btcmine::kernels
