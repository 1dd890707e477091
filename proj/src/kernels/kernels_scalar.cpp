#include "drmpc/kernels.hpp"

#include <limits>

namespace drmpc::kernels::scalar {

void max_violation(RowMatrix normals, std::span<const double> offsets, PointBlock points,
                   std::span<double> out) {
  const std::size_t n = points.dim;
  for (std::size_t p = 0; p < points.count; ++p) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < normals.rows; ++i) {
      const double* a = normals.data + i * n;
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s = s + a[j] * points.data[j * points.count + p];
      s = s - offsets[i];
      best = s > best ? s : best;
    }
    out[p] = best;
  }
}

void support(PointBlock vertices, RowMatrix directions, std::span<double> out) {
  const std::size_t n = vertices.dim;
  for (std::size_t d = 0; d < directions.rows; ++d) {
    const double* a = directions.data + d * n;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < vertices.count; ++v) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s = s + a[j] * vertices.data[j * vertices.count + v];
      best = s > best ? s : best;
    }
    out[d] = best;
  }
}

}  // namespace drmpc::kernels::scalar
