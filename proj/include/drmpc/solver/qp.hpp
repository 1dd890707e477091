#pragma once

#include <vector>

#include "drmpc/common.hpp"
#include "drmpc/solver/lp.hpp"

namespace drmpc::solver {

// minimize 1/2 z'Hz + g'z + constant  s.t.  E z = f,  G z <= h.
struct QpProblem {
  Mat hessian;
  Vec gradient;
  double constant = 0.0;
  Mat ineq_normals;
  Vec ineq_offsets;
  Mat eq_normals;
  Vec eq_offsets;

  int num_variables() const { return static_cast<int>(hessian.rows()); }
  int num_inequalities() const { return static_cast<int>(ineq_normals.rows()); }
  int num_equalities() const { return static_cast<int>(eq_normals.rows()); }
  LinearSystem constraints() const { return {eq_normals, eq_offsets, ineq_normals, ineq_offsets}; }
};

enum class QpStatus { optimal, infeasible, numerical_failure };

const char* to_string(QpStatus s);

struct QpSolution {
  Vec inputs;
  double value = 0.0;
  QpStatus status = QpStatus::infeasible;
  std::vector<int> active_set;  // inequality indices active at the solution
  Vec ineq_multipliers;         // size = #inequalities (zero if inactive)
  Vec eq_multipliers;
  int iterations = 0;
};

struct KktResiduals {
  double stationarity = 0;
  double primal = 0;         // max violation of E z = f and G z <= h
  double dual = 0;           // max(-lambda)
  double complementarity = 0;
};

struct QpOptions {
  double feasibility_tol = 1e-9;
  int max_iterations = 0;  // 0: 50 * (rows + 1)
};

// Primal active-set method from a phase-1 feasible point.
QpSolution solve_qp(const QpProblem& qp, const QpOptions& opt = {}, const Vec* hint = nullptr);

KktResiduals kkt_residuals(const QpProblem& qp, const QpSolution& sol);

}  // namespace drmpc::solver
