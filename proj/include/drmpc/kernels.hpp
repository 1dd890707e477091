#pragma once

// Batched dot-product kernels behind the polytope layer.
//
// Every kernel has a scalar reference implementation and, where the build and
// CPU allow it, an AVX2 (x86-64) or NEON (aarch64) variant. The variants
// perform the same multiplies and adds in the same order as the reference
// (no FMA contraction), so results are bit-identical across ISAs.

#include <cstddef>
#include <span>
#include <string_view>

namespace drmpc::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view name(Isa isa);

// Best ISA supported by both this build and the running CPU.
Isa detected_isa();

// ISA used by the dispatching entry points. Defaults to detected_isa(), or to
// scalar when the environment variable DRMPC_SIMD=scalar is set.
Isa active_isa();

// Force an ISA (tests, benchmarks). Throws if unsupported on this machine.
void set_active_isa(Isa isa);

bool is_supported(Isa isa);

// Column-major block of `count` points in `dim` dimensions:
// coordinate j of point p lives at data[j * count + p].
struct PointBlock {
  const double* data = nullptr;
  std::size_t count = 0;
  std::size_t dim = 0;
};

// Row-major r x dim matrix (halfspace normals or query directions).
struct RowMatrix {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t dim = 0;
};

// out[p] = max_i ( sum_j normals(i, j) * point_p[j] - offsets[i] ).
// A point is inside {x : N x <= b} iff out[p] <= 0. Empty normals give -inf.
void max_violation(RowMatrix normals, std::span<const double> offsets, PointBlock points,
                   std::span<double> out);

// out[d] = max_v sum_j directions(d, j) * vertex_v[j]  (support function).
void support(PointBlock vertices, RowMatrix directions, std::span<double> out);

// Per-ISA entry points, exposed for equivalence testing.
namespace scalar {
void max_violation(RowMatrix normals, std::span<const double> offsets, PointBlock points,
                   std::span<double> out);
void support(PointBlock vertices, RowMatrix directions, std::span<double> out);
}  // namespace scalar

#if defined(DRMPC_HAVE_AVX2)
namespace avx2 {
void max_violation(RowMatrix normals, std::span<const double> offsets, PointBlock points,
                   std::span<double> out);
void support(PointBlock vertices, RowMatrix directions, std::span<double> out);
}  // namespace avx2
#endif

#if defined(DRMPC_HAVE_NEON)
namespace neon {
void max_violation(RowMatrix normals, std::span<const double> offsets, PointBlock points,
                   std::span<double> out);
void support(PointBlock vertices, RowMatrix directions, std::span<double> out);
}  // namespace neon
#endif

// Calls the given ISA's variant directly, bypassing the active selection.
void max_violation_with(Isa isa, RowMatrix normals, std::span<const double> offsets,
                        PointBlock points, std::span<double> out);
void support_with(Isa isa, PointBlock vertices, RowMatrix directions, std::span<double> out);

}  // namespace drmpc::kernels
