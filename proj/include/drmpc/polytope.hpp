#pragma once

// Set algebra on compact convex polytopes in low dimension.
//
// PolytopeH is the halfspace form {x : N x <= b}; PolytopeV is the vertex
// form conv{v_1, ..., v_k}. Both are immutable values. Exact hull reduction of
// vertex lists is done for n <= 3; higher dimensions keep redundant points,
// which does not affect support functions.

#include <span>
#include <vector>

#include "drmpc/common.hpp"

namespace drmpc {

inline constexpr double kMembershipTol = 1e-9;
inline constexpr double kVertexDedupTol = 1e-8;

class PolytopeH {
 public:
  // Validates: finite entries, nonzero rows, bounded recession cone.
  PolytopeH(Mat normals, Vec offsets);

  static PolytopeH box(const Vec& lower, const Vec& upper);

  int dim() const { return static_cast<int>(normals_.cols()); }
  int num_rows() const { return static_cast<int>(normals_.rows()); }
  const Mat& normals() const { return normals_; }
  const Vec& offsets() const { return offsets_; }
  // Row-major copy of the normals for the batch kernels.
  std::span<const double> normals_row_major() const { return packed_; }

  // Same normals, new offsets. Boundedness only depends on the normals, so no
  // recheck is needed.
  PolytopeH with_offsets(Vec offsets) const;

 private:
  struct Trusted {};
  PolytopeH(Trusted, Mat normals, Vec offsets);
  void pack();

  Mat normals_;
  Vec offsets_;
  std::vector<double> packed_;
};

class PolytopeV {
 public:
  // Canonicalizes: dedup, then hull reduction for n <= 3.
  explicit PolytopeV(std::vector<Vec> points);
  // All points as rows of a k x n matrix.
  static PolytopeV from_rows(const Mat& rows);
  static PolytopeV singleton(const Vec& point);

  int dim() const { return dim_; }
  std::size_t size() const { return static_cast<std::size_t>(coords_.rows()); }
  Vec vertex(std::size_t i) const { return coords_.row(static_cast<Eigen::Index>(i)).transpose(); }
  std::vector<Vec> vertices() const;
  // k x n, column-major (the kernels' PointBlock layout).
  const Mat& coords() const { return coords_; }

 private:
  struct Trusted {};
  PolytopeV(Trusted, Mat coords);
  friend PolytopeV convex_hull(std::vector<Vec> points);

  int dim_ = 0;
  Mat coords_;
};

double support(const PolytopeV& p, const Vec& direction);
// One support value per row of `directions`.
Vec support(const PolytopeV& p, const Mat& directions);

PolytopeV minkowski_sum(const PolytopeV& p, const PolytopeV& q);
PolytopeH pontryagin_diff(const PolytopeH& p, const PolytopeV& q);
PolytopeV linear_image(const Mat& m, const PolytopeV& p);
PolytopeV vertices_of(const PolytopeH& p);

// Support of an H-polytope by linear programming.
double support(const PolytopeH& p, const Vec& direction);

bool contains(const PolytopeH& p, const Vec& x, double tol = kMembershipTol);
// Membership in conv(vertices) by a feasibility LP on the convex weights.
bool contains(const PolytopeV& p, const Vec& x, double tol = kMembershipTol);
// max_i (N x - b)_i for every column-major point in `points` (count x n).
Vec max_violation(const PolytopeH& p, const Mat& points);
bool is_empty(const PolytopeH& p);

// Convex hull of a point cloud (n <= 3 exact; otherwise dedup only).
PolytopeV convex_hull(std::vector<Vec> points);
// Counter-clockwise hull in 2-D (Andrew's monotone chain), collinear points dropped.
std::vector<Vec> hull_2d(std::vector<Vec> points);
// Shoelace area of a 2-D polytope; 0 for fewer than 3 vertices.
double area_2d(const PolytopeV& p);

}  // namespace drmpc
