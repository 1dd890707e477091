#include "drmpc/kernels.hpp"

#include <immintrin.h>

#include <limits>

namespace drmpc::kernels::avx2 {

namespace {

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d m = _mm_max_pd(lo, hi);
  __m128d sw = _mm_unpackhi_pd(m, m);
  return _mm_cvtsd_f64(_mm_max_sd(m, sw));
}

}  // namespace

void max_violation(RowMatrix normals, std::span<const double> offsets, PointBlock points,
                   std::span<double> out) {
  const std::size_t n = points.dim;
  const std::size_t stride = points.count;
  const std::size_t full = points.count - points.count % 4;
  const double ninf = -std::numeric_limits<double>::infinity();

  for (std::size_t p = 0; p < full; p += 4) {
    __m256d best = _mm256_set1_pd(ninf);
    for (std::size_t i = 0; i < normals.rows; ++i) {
      const double* a = normals.data + i * n;
      __m256d s = _mm256_setzero_pd();
      for (std::size_t j = 0; j < n; ++j) {
        __m256d x = _mm256_loadu_pd(points.data + j * stride + p);
        s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_set1_pd(a[j]), x));
      }
      s = _mm256_sub_pd(s, _mm256_set1_pd(offsets[i]));
      best = _mm256_max_pd(s, best);
    }
    _mm256_storeu_pd(out.data() + p, best);
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
  const std::size_t full = vertices.count - vertices.count % 4;
  const double ninf = -std::numeric_limits<double>::infinity();

  for (std::size_t d = 0; d < directions.rows; ++d) {
    const double* a = directions.data + d * n;
    __m256d bestv = _mm256_set1_pd(ninf);
    for (std::size_t v = 0; v < full; v += 4) {
      __m256d s = _mm256_setzero_pd();
      for (std::size_t j = 0; j < n; ++j) {
        __m256d x = _mm256_loadu_pd(vertices.data + j * stride + v);
        s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_set1_pd(a[j]), x));
      }
      bestv = _mm256_max_pd(s, bestv);
    }
    double best = full > 0 ? hmax(bestv) : ninf;
    for (std::size_t v = full; v < vertices.count; ++v) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s = s + a[j] * vertices.data[j * stride + v];
      best = s > best ? s : best;
    }
    out[d] = best;
  }
}

}  // namespace drmpc::kernels::avx2
