#include "drmpc/kernels.hpp"

#include <arm_neon.h>

#include <limits>

namespace drmpc::kernels::neon {

void max_violation(RowMatrix normals, std::span<const double> offsets, PointBlock points,
                   std::span<double> out) {
  const std::size_t n = points.dim;
  const std::size_t stride = points.count;
  const std::size_t full = points.count - points.count % 2;
  const double ninf = -std::numeric_limits<double>::infinity();

  for (std::size_t p = 0; p < full; p += 2) {
    float64x2_t best = vdupq_n_f64(ninf);
    for (std::size_t i = 0; i < normals.rows; ++i) {
      const double* a = normals.data + i * n;
      float64x2_t s = vdupq_n_f64(0.0);
      for (std::size_t j = 0; j < n; ++j) {
        float64x2_t x = vld1q_f64(points.data + j * stride + p);
        s = vaddq_f64(s, vmulq_f64(vdupq_n_f64(a[j]), x));
      }
      s = vsubq_f64(s, vdupq_n_f64(offsets[i]));
      best = vmaxq_f64(s, best);
    }
    vst1q_f64(out.data() + p, best);
  }

  for (std::size_t p = full; p < points.count; ++p) {
    double best = ninf;
    for (std::size_t i = 0; i < normals.rows; ++i) {
      const double* a = normals.data + i * n;
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s = s + a[j] * points.data[j * stride + p];
      s = s - offsets[i];
      best = s > best ? s : best;
    }
    out[p] = best;
  }
}

void support(PointBlock vertices, RowMatrix directions, std::span<double> out) {
  const std::size_t n = vertices.dim;
  const std::size_t stride = vertices.count;
  const std::size_t full = vertices.count - vertices.count % 2;
  const double ninf = -std::numeric_limits<double>::infinity();

  for (std::size_t d = 0; d < directions.rows; ++d) {
    const double* a = directions.data + d * n;
    float64x2_t bestv = vdupq_n_f64(ninf);
    for (std::size_t v = 0; v < full; v += 2) {
      float64x2_t s = vdupq_n_f64(0.0);
      for (std::size_t j = 0; j < n; ++j) {
        float64x2_t x = vld1q_f64(vertices.data + j * stride + v);
        s = vaddq_f64(s, vmulq_f64(vdupq_n_f64(a[j]), x));
      }
      bestv = vmaxq_f64(s, bestv);
    }
    double best = full > 0 ? vmaxvq_f64(bestv) : ninf;
    for (std::size_t v = full; v < vertices.count; ++v) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s = s + a[j] * vertices.data[j * stride + v];
      best = s > best ? s : best;
    }
    out[d] = best;
  }
}

}  // namespace drmpc::kernels::neon
