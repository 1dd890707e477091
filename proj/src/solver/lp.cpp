#include "drmpc/solver/lp.hpp"

#include "nullspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace drmpc::solver {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

std::optional<std::pair<Mat, Vec>> independent_equalities(const Mat& eq, const Vec& rhs,
                                                          double tol) {
  if (eq.rows() == 0) return std::make_pair(eq, rhs);
  Eigen::JacobiSVD<Mat> svd(eq, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > 1e-12 * std::max(1.0, smax)) ++rank;
  const Mat u = svd.matrixU().leftCols(rank);
  const Vec projected = u * (u.transpose() * rhs);
  if ((rhs - projected).lpNorm<Eigen::Infinity>() > tol * std::max(1.0, rhs.lpNorm<Eigen::Infinity>()))
    return std::nullopt;
  // Rotated rows U_r' E = S_r V_r' span the same row space.
  Mat rows = s.head(rank).asDiagonal() * svd.matrixV().leftCols(rank).transpose();
  Vec r = u.transpose() * rhs;
  return std::make_pair(std::move(rows), std::move(r));
}

namespace {

using detail::NullSpace;
using detail::null_space;
using detail::independent_of;

template <typename Stop>
LpResult active_set_lp(const Vec& c, const Mat& eq, const Mat& ineq, const Vec& ineq_rhs, Vec y,
                       std::vector<int> work, int max_iter, Stop stop) {
  const int d = static_cast<int>(y.size());
  const int r = static_cast<int>(ineq.rows());
  const double cscale = std::max(1.0, c.norm());
  LpResult res;
  std::vector<char> in_work(r, 0);
  for (int i : work) in_work[i] = 1;

  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    NullSpace ns = null_space(eq, ineq, work, d);
    Vec p = ns.full ? Vec::Zero(d) : Vec(-(ns.z * (ns.z.transpose() * c)));

    if (p.norm() > 1e-12 * cscale) {
      int block = -1;
      double alpha = std::numeric_limits<double>::infinity();
      for (int i = 0; i < r; ++i) {
        if (in_work[i]) continue;
        const double gp = ineq.row(i).dot(p);
        if (gp <= 1e-12 * ineq.row(i).norm() * p.norm()) continue;
        const double slack = std::max(0.0, ineq_rhs(i) - ineq.row(i).dot(y));
        const double a = slack / gp;
        if (a < alpha) {
          alpha = a;
          block = i;
        }
      }
      if (block < 0) {
        res.status = LpStatus::unbounded;
        res.point = y;
        return res;
      }
      y += alpha * p;
      work.push_back(block);
      in_work[block] = 1;
      if (stop(y)) break;
      continue;
    }

    // Stationary on the working set: inspect multipliers, A' lambda = -c.
    const int k = static_cast<int>(ns.r.rows());
    Vec lambda = Vec::Zero(k);
    if (k > 0) lambda = ns.r.triangularView<Eigen::Upper>().solve(ns.q1.transpose() * (-c));
    int drop = -1;
    const int neq = static_cast<int>(eq.rows());
    for (std::size_t w = 0; w < work.size(); ++w) {
      if (lambda(neq + static_cast<int>(w)) < -1e-10 * cscale) {
        if (drop < 0 || work[w] < work[drop]) drop = static_cast<int>(w);
      }
    }
    if (drop < 0) {
      res.status = LpStatus::optimal;
      res.point = y;
      res.value = c.dot(y);
      res.active = work;
      return res;
    }
    in_work[work[drop]] = 0;
    work.erase(work.begin() + drop);
  }

  res.point = y;
  res.value = c.dot(y);
  res.active = work;
  res.status = stop(y) ? LpStatus::optimal : LpStatus::iteration_limit;
  return res;
}

int iteration_cap(const LpOptions& opt, int rows) {
  return opt.max_iterations > 0 ? opt.max_iterations : 50 * (rows + 1);
}

}  // namespace

FeasibilityResult find_feasible_point(const LinearSystem& sys, const LpOptions& opt, const Vec* hint) {
  const int d = sys.dim();
  FeasibilityResult out;
  const double htol = opt.feasibility_tol;

  Mat eq = sys.eq;
  Vec f = sys.eq_rhs;
  if (eq.rows() > 0) {
    auto reduced = independent_equalities(sys.eq, sys.eq_rhs, htol);
    if (!reduced) {
      out.violation = std::numeric_limits<double>::infinity();
      return out;
    }
    eq = std::move(reduced->first);
    f = std::move(reduced->second);
  }

  Vec y0;
  if (eq.rows() > 0) {
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(eq);
    if (hint != nullptr && hint->size() == d)
      y0 = *hint + cod.solve(Vec(f - eq * *hint));
    else
      y0 = cod.solve(f);
  } else {
    y0 = (hint != nullptr && hint->size() == d) ? *hint : Vec::Zero(d);
  }

  const int r = static_cast<int>(sys.ineq.rows());
  if (r == 0) {
    out.feasible = true;
    out.point = y0;
    out.violation = -std::numeric_limits<double>::infinity();
    return out;
  }

  Vec viol = sys.ineq * y0 - sys.ineq_rhs;
  int worst = 0;
  const double t0 = viol.maxCoeff(&worst);
  if (t0 <= 0.0) {
    out.feasible = true;
    out.point = y0;
    out.violation = t0;
    return out;
  }

  // Augmented problem over (y, t): min t  s.t.  G y - t <= h,  -t <= 0.
  Mat eq_aug = Mat::Zero(eq.rows(), d + 1);
  if (eq.rows() > 0) eq_aug.leftCols(d) = eq;
  Mat g_aug(r + 1, d + 1);
  g_aug.topLeftCorner(r, d) = sys.ineq;
  g_aug.col(d).head(r).setConstant(-1.0);
  g_aug.row(r).setZero();
  g_aug(r, d) = -1.0;
  Vec h_aug(r + 1);
  h_aug.head(r) = sys.ineq_rhs;
  h_aug(r) = 0.0;

  Vec c = Vec::Zero(d + 1);
  c(d) = 1.0;
  Vec start(d + 1);
  start.head(d) = y0;
  start(d) = t0;

  LpResult lp = active_set_lp(c, eq_aug, g_aug, h_aug, start, {worst}, iteration_cap(opt, r),
                              [d](const Vec& y) { return y(d) <= 0.0; });
  out.iterations = lp.iterations;
  out.point = lp.point.head(d);
  out.violation = (sys.ineq * out.point - sys.ineq_rhs).maxCoeff();
  const double scale = std::max(1.0, sys.ineq_rhs.lpNorm<Eigen::Infinity>());
  out.feasible = out.violation <= htol * scale;
  return out;
}

LpResult minimize(const Vec& c, const LinearSystem& sys, const LpOptions& opt, const Vec* hint) {
  LpResult res;
  FeasibilityResult feas = find_feasible_point(sys, opt, hint);
  res.iterations = feas.iterations;
  if (!feas.feasible) {
    res.status = LpStatus::infeasible;
    return res;
  }
  const int d = sys.dim();
  Mat eq = sys.eq;
  if (eq.rows() > 0) eq = independent_equalities(sys.eq, sys.eq_rhs, opt.feasibility_tol)->first;

  const int r = static_cast<int>(sys.ineq.rows());
  const double scale = std::max(1.0, sys.ineq_rhs.lpNorm<Eigen::Infinity>());
  std::vector<int> work;
  for (int i = 0; i < r; ++i) {
    const double slack = sys.ineq_rhs(i) - sys.ineq.row(i).dot(feas.point);
    if (std::abs(slack) <= opt.feasibility_tol * scale && independent_of(eq, sys.ineq, work, d, sys.ineq.row(i)))
      work.push_back(i);
  }
  LpResult lp = active_set_lp(c, eq, sys.ineq, sys.ineq_rhs, feas.point, work, iteration_cap(opt, r),
                              [](const Vec&) { return false; });
  lp.iterations += res.iterations;
  return lp;
}

}  // namespace drmpc::solver
