#include <atomic>
#include <cstdlib>
#include <string>

#include "memd/error.hpp"
#include "memd/kernels.hpp"

namespace memd::kernels {

namespace {

constexpr KernelTable kScalarTable{Backend::Scalar, &scalar::accumulate_powers,
                                   &scalar::accumulate_j, &scalar::axpy,
                                   &scalar::quadratic_loglik};

#if MEMD_HAVE_AVX2_KERNELS
constexpr KernelTable kAvx2Table{Backend::Avx2, &avx2::accumulate_powers, &avx2::accumulate_j,
                                 &avx2::axpy, &avx2::quadratic_loglik};
#endif

bool cpu_has_avx2() {
#if MEMD_HAVE_AVX2_KERNELS && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("MEMD_KERNELS"); env != nullptr && std::string(env) == "scalar") {
    return &kScalarTable;
  }
  return &table_for(cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar);
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

bool backend_supported(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return true;
    case Backend::Avx2: return cpu_has_avx2();
  }
  return false;
}

const KernelTable& table_for(Backend backend) {
  if (!backend_supported(backend)) {
    throw Error(ErrorCode::InvalidArgument,
                "kernel backend '" + std::string(to_string(backend)) + "' not supported on this CPU");
  }
#if MEMD_HAVE_AVX2_KERNELS
  if (backend == Backend::Avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void select_backend(Backend backend) {
  active_slot().store(&table_for(backend), std::memory_order_release);
}

}  // namespace memd::kernels
