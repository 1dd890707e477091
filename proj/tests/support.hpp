#pragma once

#include <random>
#include <vector>

#include "drmpc/lpv_model.hpp"
#include "drmpc/polytope.hpp"

namespace drmpc::fx {

inline Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline PolytopeH box2(double x, double y) { return PolytopeH::box(vec2(-x, -y), vec2(x, y)); }

// Benchmark model built by hand (independent of the JSON loader).
inline LpvModel benchmark(double theta_delta = 0.1) {
  const Mat a1 = mat2(-0.0063, -0.0938, 0.0, 0.0188);
  Mat b(2, 1);
  b << 0.3190, -1.3080;
  LpvModel m{mat2(0.2485, -1.0355, 0.8910, 0.4065),
             {a1, a1},
             b,
             {Mat::Zero(2, 1), Mat::Zero(2, 1)},
             box2(1.0, 1.0),
             box2(theta_delta, theta_delta),
             PolytopeV::singleton(Vec::Zero(2)),
             box2(60.0, 41.7),
             PolytopeH::box(Vec::Constant(1, -12.5), Vec::Constant(1, 12.5))};
  m.validate();
  return m;
}

// Reference 4-halfspace description of the robust disturbance set.
inline PolytopeH reference_d() {
  Mat n(4, 2);
  n << 0, -0.5387, 0.1940, 0.9701, 0, 0.5387, -0.1940, -0.9701;
  Vec b(4);
  b << 0.8425, 0.1455, 0.8425, 0.1455;
  return PolytopeH(n, b);
}

inline Vec random_vec(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

inline Mat random_mat(std::mt19937_64& rng, int r, int c, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

inline std::vector<Vec> random_cloud(std::mt19937_64& rng, int n, int k, double scale) {
  std::vector<Vec> pts;
  for (int i = 0; i < k; ++i) pts.push_back(random_vec(rng, n, -scale, scale));
  return pts;
}

// Random bounded H-polytope containing the origin: random unit normals plus a box.
inline PolytopeH random_h(std::mt19937_64& rng, int n, int extra_rows) {
  std::uniform_real_distribution<double> off(0.5, 3.0);
  Mat normals(2 * n + extra_rows, n);
  Vec b(2 * n + extra_rows);
  for (int i = 0; i < n; ++i) {
    normals.row(2 * i) = Vec::Unit(n, i).transpose();
    normals.row(2 * i + 1) = -Vec::Unit(n, i).transpose();
    b(2 * i) = off(rng);
    b(2 * i + 1) = off(rng);
  }
  for (int r = 0; r < extra_rows; ++r) {
    Vec a = random_vec(rng, n, -1, 1);
    normals.row(2 * n + r) = a.normalized().transpose();
    b(2 * n + r) = off(rng);
  }
  return PolytopeH(normals, b);
}

// Uniform-ish sample of conv(vertices) via random convex weights.
inline Vec random_convex_point(std::mt19937_64& rng, const PolytopeV& p) {
  std::exponential_distribution<double> e(1.0);
  Vec w(p.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = e(rng);
  w /= w.sum();
  return p.coords().transpose() * w;
}

}  // namespace drmpc::fx
