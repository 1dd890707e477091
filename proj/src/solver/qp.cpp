#include "drmpc/solver/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nullspace.hpp"

namespace drmpc::solver {

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::infeasible: return "infeasible";
    case QpStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

QpSolution solve_qp(const QpProblem& qp, const QpOptions& opt, const Vec* hint) {
  QpSolution sol;
  const int d = qp.num_variables();
  const int r = qp.num_inequalities();
  require_dims(qp.gradient.size() == d, "qp gradient size mismatch");
  require_dims(r == 0 || qp.ineq_normals.cols() == d, "qp inequality column mismatch");
  require_dims(qp.num_equalities() == 0 || qp.eq_normals.cols() == d, "qp equality column mismatch");

  LinearSystem sys = qp.constraints();
  if (sys.ineq.rows() == 0) sys.ineq.resize(0, d);
  if (sys.eq.rows() == 0) sys.eq.resize(0, d);
  LpOptions lpo{opt.feasibility_tol, opt.max_iterations};
  FeasibilityResult feas = find_feasible_point(sys, lpo, hint);
  sol.iterations = feas.iterations;
  if (!feas.feasible) {
    sol.status = QpStatus::infeasible;
    return sol;
  }

  // Independent equality rows E' = U' E; multipliers map back through U.
  Mat eq(0, d);
  Mat eq_basis(qp.num_equalities(), 0);
  if (qp.num_equalities() > 0) {
    Eigen::JacobiSVD<Mat> svd(qp.eq_normals, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s(i) > 1e-12 * std::max(1.0, s(0))) ++rank;
    eq_basis = svd.matrixU().leftCols(rank);
    eq = eq_basis.transpose() * qp.eq_normals;
  }
  const int neq = static_cast<int>(eq.rows());

  Vec z = feas.point;
  const double scale = std::max(1.0, r > 0 ? qp.ineq_offsets.lpNorm<Eigen::Infinity>() : 1.0);
  std::vector<int> work;
  std::vector<char> in_work(r, 0);
  for (int i = 0; i < r; ++i) {
    const double slack = qp.ineq_offsets(i) - qp.ineq_normals.row(i).dot(z);
    if (std::abs(slack) <= opt.feasibility_tol * scale &&
        detail::independent_of(eq, qp.ineq_normals, work, d, qp.ineq_normals.row(i))) {
      work.push_back(i);
      in_work[i] = 1;
    }
  }

  const int cap = opt.max_iterations > 0 ? opt.max_iterations : 50 * (r + neq + 1);
  const double hscale = std::max(1.0, qp.hessian.lpNorm<Eigen::Infinity>());
  for (int it = 0; it < cap; ++it) {
    sol.iterations = feas.iterations + it + 1;
    const Vec grad = qp.hessian * z + qp.gradient;
    detail::NullSpace ns = detail::null_space(eq, qp.ineq_normals, work, d);

    Vec p = Vec::Zero(d);
    if (!ns.full) {
      const Mat reduced = ns.z.transpose() * qp.hessian * ns.z;
      Eigen::LLT<Mat> llt(reduced);
      if (llt.info() != Eigen::Success) {
        sol.status = QpStatus::numerical_failure;
        sol.inputs = z;
        return sol;
      }
      p = -(ns.z * llt.solve(ns.z.transpose() * grad));
    }

    if (p.norm() > 1e-11 * std::max(1.0, z.norm())) {
      double alpha = 1.0;
      int block = -1;
      for (int i = 0; i < r; ++i) {
        if (in_work[i]) continue;
        const double gp = qp.ineq_normals.row(i).dot(p);
        if (gp <= 1e-12 * qp.ineq_normals.row(i).norm() * p.norm()) continue;
        const double slack = std::max(0.0, qp.ineq_offsets(i) - qp.ineq_normals.row(i).dot(z));
        const double a = slack / gp;
        if (a < alpha) {
          alpha = a;
          block = i;
        }
      }
      z += alpha * p;
      if (block >= 0) {
        work.push_back(block);
        in_work[block] = 1;
      }
      continue;
    }

    const int k = static_cast<int>(ns.r.rows());
    Vec lambda = Vec::Zero(k);
    if (k > 0) lambda = ns.r.triangularView<Eigen::Upper>().solve(ns.q1.transpose() * (-grad));
    int drop = -1;
    const double ltol = 1e-10 * std::max(hscale, grad.lpNorm<Eigen::Infinity>());
    for (std::size_t w = 0; w < work.size(); ++w) {
      if (lambda(neq + static_cast<int>(w)) < -ltol) {
        if (drop < 0 || work[w] < work[drop]) drop = static_cast<int>(w);
      }
    }
    if (drop >= 0) {
      in_work[work[drop]] = 0;
      work.erase(work.begin() + drop);
      continue;
    }

    sol.status = QpStatus::optimal;
    sol.inputs = z;
    sol.value = 0.5 * z.dot(qp.hessian * z) + qp.gradient.dot(z) + qp.constant;
    sol.ineq_multipliers = Vec::Zero(r);
    for (std::size_t w = 0; w < work.size(); ++w)
      sol.ineq_multipliers(work[w]) = std::max(0.0, lambda(neq + static_cast<int>(w)));
    sol.eq_multipliers = neq > 0 ? Vec(eq_basis * lambda.head(neq)) : Vec::Zero(qp.num_equalities());
    sol.active_set = work;
    std::sort(sol.active_set.begin(), sol.active_set.end());
    return sol;
  }

  sol.status = QpStatus::numerical_failure;
  sol.inputs = z;
  return sol;
}

KktResiduals kkt_residuals(const QpProblem& qp, const QpSolution& sol) {
  KktResiduals res;
  const Vec& z = sol.inputs;
  Vec station = qp.hessian * z + qp.gradient;
  if (qp.num_inequalities() > 0) {
    station += qp.ineq_normals.transpose() * sol.ineq_multipliers;
    const Vec slack = qp.ineq_offsets - qp.ineq_normals * z;
    res.primal = std::max(0.0, -slack.minCoeff());
    res.dual = std::max(0.0, -sol.ineq_multipliers.minCoeff());
    res.complementarity = (sol.ineq_multipliers.array() * slack.array()).abs().maxCoeff();
  }
  if (qp.num_equalities() > 0) {
    station += qp.eq_normals.transpose() * sol.eq_multipliers;
    res.primal = std::max(res.primal, (qp.eq_normals * z - qp.eq_offsets).lpNorm<Eigen::Infinity>());
  }
  res.stationarity = station.lpNorm<Eigen::Infinity>();
  return res;
}

}  // namespace drmpc::solver
