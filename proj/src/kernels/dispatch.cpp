#include <atomic>
#include <cstdlib>
#include <cstring>

#include "drmpc/common.hpp"
#include "drmpc/kernels.hpp"

namespace drmpc::kernels {

namespace {

Isa initial_isa() {
  const char* env = std::getenv("DRMPC_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::scalar;
  return detected_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool is_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(DRMPC_HAVE_AVX2)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(DRMPC_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() {
  if (is_supported(Isa::avx2)) return Isa::avx2;
  if (is_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!is_supported(isa))
    throw Error(ErrorKind::unsupported, "SIMD variant not available: " + std::string(name(isa)));
  active().store(isa, std::memory_order_relaxed);
}

void max_violation_with(Isa isa, RowMatrix normals, std::span<const double> offsets,
                        PointBlock points, std::span<double> out) {
  switch (isa) {
#if defined(DRMPC_HAVE_AVX2)
    case Isa::avx2: avx2::max_violation(normals, offsets, points, out); return;
#endif
#if defined(DRMPC_HAVE_NEON)
    case Isa::neon: neon::max_violation(normals, offsets, points, out); return;
#endif
    default: scalar::max_violation(normals, offsets, points, out); return;
  }
}

void support_with(Isa isa, PointBlock vertices, RowMatrix directions, std::span<double> out) {
  switch (isa) {
#if defined(DRMPC_HAVE_AVX2)
    case Isa::avx2: avx2::support(vertices, directions, out); return;
#endif
#if defined(DRMPC_HAVE_NEON)
    case Isa::neon: neon::support(vertices, directions, out); return;
#endif
    default: scalar::support(vertices, directions, out); return;
  }
}

void max_violation(RowMatrix normals, std::span<const double> offsets, PointBlock points,
                   std::span<double> out) {
  max_violation_with(active_isa(), normals, offsets, points, out);
}

void support(PointBlock vertices, RowMatrix directions, std::span<double> out) {
  support_with(active_isa(), vertices, directions, out);
}

}  // namespace drmpc::kernels
