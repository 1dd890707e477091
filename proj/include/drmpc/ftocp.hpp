#pragma once

// Condensed finite-time optimal control problem over z = (u_0, ..., u_{N-1}):
//
//   min  sum_{j<N} x_j'Q x_j + u_j'R u_j
//   s.t. x_{j+1} = A_j x_j + B_j u_j,  x_0 given,
//        u_j in input_sets[j],  x_j in state_sets[j],  terminal condition on x_N.
//
// States are eliminated as x_j = Phi_j x_0 + Gamma_j z, so every constraint is
// affine in x_0: G z <= h + F x_0, E z = f + L x_0.

#include <iosfwd>
#include <optional>
#include <string>

#include "drmpc/lpv_model.hpp"
#include "drmpc/solver/qp.hpp"
#include "drmpc/tightening.hpp"

namespace drmpc {

struct StageCost {
  Mat q;
  Mat r;

  void validate(int n, int m) const;
  double operator()(const Vec& x, const Vec& u) const { return x.dot(q * x) + u.dot(r * u); }
};

struct Terminal {
  enum class Kind { origin, polytope } kind = Kind::origin;
  std::optional<PolytopeH> set;

  static Terminal origin() { return {}; }
  static Terminal polytope(PolytopeH p) { return {Kind::polytope, std::move(p)}; }
};

struct FtocpSpec {
  NominalSchedule schedule;
  TightenedSets tightened;
  StageCost cost;
  int horizon_n = 0;
  Terminal terminal;
  // Admissible initial states; unset means any x_0.
  std::optional<PolytopeH> initial_set;
};

using solver::QpProblem;
using solver::QpSolution;
using solver::QpStatus;

// Precomputed condensed form; evaluating a new x_0 only touches right-hand sides.
class CondensedFtocp {
 public:
  explicit CondensedFtocp(const FtocpSpec& spec);

  int num_variables() const { return static_cast<int>(hessian_.rows()); }
  int num_inequalities() const { return static_cast<int>(g_.rows()); }
  int num_equalities() const { return static_cast<int>(e_.rows()); }
  int state_dim() const { return n_; }
  int input_dim() const { return m_; }
  int horizon() const { return horizon_n_; }

  QpProblem qp(const Vec& x0) const;
  solver::LinearSystem feasibility_system(const Vec& x0) const;
  bool initial_ok(const Vec& x0) const;

  // Linear system over (z, s) with x_0 = base + s * dir, for line sweeps.
  solver::LinearSystem line_system(const Vec& base, const Vec& dir) const;

  // Predicted states x_0 .. x_N for an input sequence.
  std::vector<Vec> predict(const Vec& x0, const Vec& z) const;

  const std::optional<PolytopeH>& initial_set() const { return initial_set_; }

 private:
  int n_ = 0;
  int m_ = 0;
  int horizon_n_ = 0;
  Mat hessian_;
  Mat grad_x_;   // gradient = grad_x_ * x0
  Mat const_x_;  // constant = x0' const_x_ x0
  Mat g_;
  Vec h_;
  Mat f_;
  Mat e_;
  Mat l_;
  MatList phi_x_;  // Phi_j, j = 0..N
  MatList gamma_;  // Gamma_j, j = 0..N
  std::optional<PolytopeH> initial_set_;
};

QpProblem assemble(const FtocpSpec& spec, const Vec& x0);

struct ControlResult {
  Vec u;
  double value = 0.0;
  QpStatus status = QpStatus::infeasible;
  QpSolution solution;
};

ControlResult control_step(const CondensedFtocp& ftocp, const Vec& x0, const solver::QpOptions& opt = {});
ControlResult control_step(const FtocpSpec& spec, const Vec& x0);

bool is_feasible(const CondensedFtocp& ftocp, const Vec& x0, const Vec* hint = nullptr, Vec* point = nullptr);
bool is_feasible(const FtocpSpec& spec, const Vec& x0);

// Plain-text standard form: dimensions, then H, g, constant, G, h, E, f.
void dump_qp(std::ostream& os, const QpProblem& qp);

}  // namespace drmpc
