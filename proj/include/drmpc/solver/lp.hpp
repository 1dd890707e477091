#pragma once

// Dense active-set linear programming for small problems in inequality form
//
//     minimize  c'y   subject to  E y = f,  G y <= h,   y free.
//
// Working sets always contain every (independent) equality row. Blocking
// constraints are added with smallest-index tie-breaking and dropped by
// Bland's rule, which keeps degenerate problems from cycling.

#include <optional>
#include <vector>

#include "drmpc/common.hpp"

namespace drmpc::solver {

struct LinearSystem {
  Mat eq;       // k x d
  Vec eq_rhs;   // k
  Mat ineq;     // r x d
  Vec ineq_rhs; // r

  int dim() const { return static_cast<int>(eq.cols() > 0 ? eq.cols() : ineq.cols()); }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vec point;
  double value = 0.0;
  std::vector<int> active;  // inequality rows in the final working set
  int iterations = 0;
};

struct FeasibilityResult {
  bool feasible = false;
  Vec point;             // a point satisfying the system within tol (when feasible)
  double violation = 0;  // max_i (G y - h)_i at `point`, or the phase-1 optimum
  int iterations = 0;
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  int max_iterations = 0;  // 0: 50 * (rows + 1)
};

// Phase-1: find y with E y = f, G y <= h (+tol). `hint` seeds the search.
// Minimizes the largest violation t over (y, t); stops as soon as t <= 0.
FeasibilityResult find_feasible_point(const LinearSystem& sys, const LpOptions& opt = {},
                                      const Vec* hint = nullptr);

// Two-phase solve of min c'y.
LpResult minimize(const Vec& c, const LinearSystem& sys, const LpOptions& opt = {},
                  const Vec* hint = nullptr);

// Reduces equality rows to an independent set. Returns nullopt when the
// equalities are inconsistent (residual above tol).
std::optional<std::pair<Mat, Vec>> independent_equalities(const Mat& eq, const Vec& rhs, double tol);

}  // namespace drmpc::solver
