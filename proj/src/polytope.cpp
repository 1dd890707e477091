#include "drmpc/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "drmpc/kernels.hpp"
#include "drmpc/solver/lp.hpp"

namespace drmpc {

namespace {

bool all_finite(const Mat& m) { return m.allFinite(); }

// Farkas: {d : N d <= 0} = {0} iff every +-e_i is a nonnegative combination of the rows.
bool recession_cone_trivial(const Mat& normals) {
  const int r = static_cast<int>(normals.rows());
  const int n = static_cast<int>(normals.cols());
  solver::LinearSystem sys;
  sys.eq = normals.transpose();
  sys.ineq = -Mat::Identity(r, r);
  sys.ineq_rhs = Vec::Zero(r);
  for (int i = 0; i < n; ++i) {
    for (double s : {1.0, -1.0}) {
      sys.eq_rhs = Vec::Zero(n);
      sys.eq_rhs(i) = s;
      if (!solver::find_feasible_point(sys).feasible) return false;
    }
  }
  return true;
}

double coordinate_scale(const std::vector<Vec>& pts) {
  double s = 0.0;
  for (const Vec& p : pts) s = std::max(s, p.lpNorm<Eigen::Infinity>());
  return std::max(1.0, s);
}

std::vector<Vec> dedup(std::vector<Vec> pts) {
  const double tol = kVertexDedupTol * coordinate_scale(pts);
  std::vector<Vec> out;
  for (Vec& p : pts) {
    bool dup = false;
    for (const Vec& q : out) {
      if ((p - q).lpNorm<Eigen::Infinity>() <= tol) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(std::move(p));
  }
  return out;
}

// v in conv(others)?  lambda >= 0, sum lambda = 1, sum lambda_j v_j = v.
bool in_hull_of_others(const std::vector<Vec>& pts, std::size_t skip) {
  const int n = static_cast<int>(pts[skip].size());
  const int k = static_cast<int>(pts.size()) - 1;
  if (k == 0) return false;
  solver::LinearSystem sys;
  sys.eq = Mat::Zero(n + 1, k);
  sys.eq_rhs = Vec::Zero(n + 1);
  int c = 0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j == skip) continue;
    sys.eq.col(c).head(n) = pts[j];
    sys.eq(n, c) = 1.0;
    ++c;
  }
  sys.eq_rhs.head(n) = pts[skip];
  sys.eq_rhs(n) = 1.0;
  sys.ineq = -Mat::Identity(k, k);
  sys.ineq_rhs = Vec::Zero(k);
  return solver::find_feasible_point(sys, {1e-10, 0}).feasible;
}

std::vector<Vec> hull_3d(std::vector<Vec> pts) {
  for (std::size_t i = pts.size(); i-- > 0;) {
    if (pts.size() > 1 && in_hull_of_others(pts, i)) pts.erase(pts.begin() + static_cast<long>(i));
  }
  return pts;
}

Mat rows_of(const std::vector<Vec>& pts, int n) {
  Mat m(static_cast<Eigen::Index>(pts.size()), n);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    require_dims(pts[i].size() == n, "vertex dimension mismatch");
    m.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  }
  return m;
}

std::vector<double> row_major(const Mat& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
  return out;
}

}  // namespace

PolytopeH::PolytopeH(Mat normals, Vec offsets) : normals_(std::move(normals)), offsets_(std::move(offsets)) {
  require_dims(normals_.rows() == offsets_.size(), "normals/offsets row count mismatch");
  if (normals_.cols() == 0) throw Error(ErrorKind::dimension, "polytope with zero ambient dimension");
  if (!all_finite(normals_) || !offsets_.allFinite())
    throw Error(ErrorKind::structural, "polytope has non-finite entries");
  for (Eigen::Index i = 0; i < normals_.rows(); ++i)
    if (normals_.row(i).lpNorm<Eigen::Infinity>() == 0.0)
      throw Error(ErrorKind::structural, "polytope normal row " + std::to_string(i) + " is zero");
  if (!recession_cone_trivial(normals_)) throw Error(ErrorKind::structural, "polytope is unbounded");
  pack();
}

PolytopeH::PolytopeH(Trusted, Mat normals, Vec offsets)
    : normals_(std::move(normals)), offsets_(std::move(offsets)) {
  pack();
}

void PolytopeH::pack() { packed_ = row_major(normals_); }

PolytopeH PolytopeH::box(const Vec& lower, const Vec& upper) {
  require_dims(lower.size() == upper.size() && lower.size() > 0, "box bounds dimension mismatch");
  const Eigen::Index n = lower.size();
  Mat normals(2 * n, n);
  normals << Mat::Identity(n, n), -Mat::Identity(n, n);
  Vec offsets(2 * n);
  offsets << upper, -lower;
  if (!offsets.allFinite()) throw Error(ErrorKind::structural, "box bounds must be finite");
  return PolytopeH(Trusted{}, std::move(normals), std::move(offsets));
}

PolytopeH PolytopeH::with_offsets(Vec offsets) const {
  require_dims(offsets.size() == offsets_.size(), "offset count mismatch");
  if (!offsets.allFinite()) throw Error(ErrorKind::structural, "polytope has non-finite entries");
  return PolytopeH(Trusted{}, normals_, std::move(offsets));
}

PolytopeV::PolytopeV(std::vector<Vec> points) {
  if (points.empty()) throw Error(ErrorKind::structural, "empty vertex list");
  dim_ = static_cast<int>(points.front().size());
  if (dim_ == 0) throw Error(ErrorKind::dimension, "vertex of zero dimension");
  for (const Vec& p : points) {
    require_dims(p.size() == dim_, "vertex dimension mismatch");
    if (!p.allFinite()) throw Error(ErrorKind::structural, "vertex has non-finite entries");
  }
  std::vector<Vec> hull = convex_hull(std::move(points)).vertices();
  coords_ = rows_of(hull, dim_);
}

PolytopeV::PolytopeV(Trusted, Mat coords) : dim_(static_cast<int>(coords.cols())), coords_(std::move(coords)) {}

PolytopeV PolytopeV::from_rows(const Mat& rows) {
  std::vector<Vec> pts;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) pts.emplace_back(rows.row(i).transpose());
  return PolytopeV(std::move(pts));
}

PolytopeV PolytopeV::singleton(const Vec& point) {
  if (!point.allFinite()) throw Error(ErrorKind::structural, "vertex has non-finite entries");
  return PolytopeV(Trusted{}, Mat(point.transpose()));
}

std::vector<Vec> PolytopeV::vertices() const {
  std::vector<Vec> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(vertex(i));
  return out;
}

std::vector<Vec> hull_2d(std::vector<Vec> pts) {
  pts = dedup(std::move(pts));
  if (pts.size() < 3) return pts;
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  const double scale = coordinate_scale(pts);
  const double tol = 1e-12 * scale * scale;
  auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
    return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
  };
  std::vector<Vec> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= tol) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= tol) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

PolytopeV convex_hull(std::vector<Vec> points) {
  if (points.empty()) throw Error(ErrorKind::structural, "empty vertex list");
  const int n = static_cast<int>(points.front().size());
  std::vector<Vec> hull;
  if (n == 1) {
    auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                        [](const Vec& a, const Vec& b) { return a(0) < b(0); });
    hull = dedup({*lo, *hi});
  } else if (n == 2) {
    hull = hull_2d(std::move(points));
  } else if (n == 3) {
    hull = hull_3d(dedup(std::move(points)));
  } else {
    hull = dedup(std::move(points));
  }
  return PolytopeV(PolytopeV::Trusted{}, rows_of(hull, n));
}

double support(const PolytopeV& p, const Vec& direction) {
  require_dims(direction.size() == p.dim(), "support direction dimension mismatch");
  return (p.coords() * direction).maxCoeff();
}

Vec support(const PolytopeV& p, const Mat& directions) {
  require_dims(directions.cols() == p.dim(), "support direction dimension mismatch");
  Vec out(directions.rows());
  if (directions.rows() == 0) return out;
  const std::vector<double> dirs = row_major(directions);
  kernels::support({p.coords().data(), p.size(), static_cast<std::size_t>(p.dim())},
                   {dirs.data(), static_cast<std::size_t>(directions.rows()), static_cast<std::size_t>(p.dim())},
                   {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

PolytopeV minkowski_sum(const PolytopeV& p, const PolytopeV& q) {
  require_dims(p.dim() == q.dim(), "minkowski_sum dimension mismatch");
  std::vector<Vec> sums;
  sums.reserve(p.size() * q.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) sums.push_back(p.vertex(i) + q.vertex(j));
  return PolytopeV(std::move(sums));
}

PolytopeH pontryagin_diff(const PolytopeH& p, const PolytopeV& q) {
  require_dims(p.dim() == q.dim(), "pontryagin_diff dimension mismatch");
  return p.with_offsets(p.offsets() - support(q, p.normals()));
}

PolytopeV linear_image(const Mat& m, const PolytopeV& p) {
  require_dims(m.cols() == p.dim(), "linear_image dimension mismatch");
  const Mat img = p.coords() * m.transpose();
  return PolytopeV::from_rows(img);
}

PolytopeV vertices_of(const PolytopeH& p) {
  const int n = p.dim();
  if (n > 3) throw Error(ErrorKind::unsupported, "vertex enumeration is limited to dimension <= 3");
  const Mat& a = p.normals();
  const Vec& b = p.offsets();
  const int r = p.num_rows();
  const double tol = kMembershipTol * std::max(1.0, b.lpNorm<Eigen::Infinity>());
  std::vector<Vec> found;
  auto consider = [&](const std::vector<int>& idx) {
    Mat sub(n, n);
    Vec rhs(n);
    for (int k = 0; k < n; ++k) {
      sub.row(k) = a.row(idx[k]);
      rhs(k) = b(idx[k]);
    }
    Eigen::FullPivLU<Mat> lu(sub);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) return;
    Vec x = lu.solve(rhs);
    if ((a * x - b).maxCoeff() <= tol) found.push_back(std::move(x));
  };
  std::vector<int> idx(n);
  if (n == 1) {
    for (int i = 0; i < r; ++i) consider({i});
  } else if (n == 2) {
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j) consider({i, j});
  } else {
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j)
        for (int k = j + 1; k < r; ++k) consider({i, j, k});
  }
  if (found.empty()) throw Error(ErrorKind::structural, "vertex enumeration of an empty polytope");
  return PolytopeV(std::move(found));
}

double support(const PolytopeH& p, const Vec& direction) {
  require_dims(direction.size() == p.dim(), "support direction dimension mismatch");
  solver::LinearSystem sys;
  sys.eq = Mat(0, p.dim());
  sys.eq_rhs = Vec(0);
  sys.ineq = p.normals();
  sys.ineq_rhs = p.offsets();
  const solver::LpResult lp = solver::minimize(-direction, sys);
  if (lp.status == solver::LpStatus::infeasible)
    throw Error(ErrorKind::structural, "support of an empty polytope");
  if (lp.status != solver::LpStatus::optimal) throw Error(ErrorKind::numerical, "support LP did not converge");
  return -lp.value;
}

bool contains(const PolytopeV& p, const Vec& x, double tol) {
  require_dims(x.size() == p.dim(), "membership dimension mismatch");
  const int n = p.dim();
  const int k = static_cast<int>(p.size());
  solver::LinearSystem sys;
  sys.eq = Mat::Zero(n + 1, k);
  sys.eq.topRows(n) = p.coords().transpose();
  sys.eq.row(n).setOnes();
  sys.eq_rhs = Vec::Zero(n + 1);
  sys.eq_rhs.head(n) = x;
  sys.eq_rhs(n) = 1.0;
  sys.ineq = -Mat::Identity(k, k);
  sys.ineq_rhs = Vec::Zero(k);
  return solver::find_feasible_point(sys, {tol, 0}).feasible;
}

bool contains(const PolytopeH& p, const Vec& x, double tol) {
  require_dims(x.size() == p.dim(), "membership dimension mismatch");
  return ((p.normals() * x - p.offsets()).array() <= tol).all();
}

Vec max_violation(const PolytopeH& p, const Mat& points) {
  require_dims(points.cols() == p.dim(), "max_violation dimension mismatch");
  Vec out(points.rows());
  if (points.rows() == 0) return out;
  kernels::max_violation({p.normals_row_major().data(), static_cast<std::size_t>(p.num_rows()),
                          static_cast<std::size_t>(p.dim())},
                         {p.offsets().data(), static_cast<std::size_t>(p.num_rows())},
                         {points.data(), static_cast<std::size_t>(points.rows()), static_cast<std::size_t>(p.dim())},
                         {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

bool is_empty(const PolytopeH& p) {
  solver::LinearSystem sys;
  sys.eq = Mat(0, p.dim());
  sys.eq_rhs = Vec(0);
  sys.ineq = p.normals();
  sys.ineq_rhs = p.offsets();
  return !solver::find_feasible_point(sys, {1e-9, 0}).feasible;
}

double area_2d(const PolytopeV& p) {
  require_dims(p.dim() == 2, "area_2d needs a 2-D polytope");
  const std::size_t k = p.size();
  if (k < 3) return 0.0;
  const Mat& c = p.coords();
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = (i + 1) % k;
    s += c(static_cast<Eigen::Index>(i), 0) * c(static_cast<Eigen::Index>(j), 1) -
         c(static_cast<Eigen::Index>(j), 0) * c(static_cast<Eigen::Index>(i), 1);
  }
  return 0.5 * std::abs(s);
}

}  // namespace drmpc
