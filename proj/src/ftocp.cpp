#include "drmpc/ftocp.hpp"

#include <cmath>
#include <ostream>

namespace drmpc {

void StageCost::validate(int n, int m) const {
  require_dims(q.rows() == n && q.cols() == n, "Q must be n x n");
  require_dims(r.rows() == m && r.cols() == m, "R must be m x m");
  auto spd = [](const Mat& a, const char* name) {
    if ((a - a.transpose()).lpNorm<Eigen::Infinity>() > 1e-12 * std::max(1.0, a.lpNorm<Eigen::Infinity>()))
      throw Error(ErrorKind::config, std::string(name) + " must be symmetric");
    Eigen::LLT<Mat> llt(a);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::config, std::string(name) + " must be positive definite");
  };
  spd(q, "Q");
  spd(r, "R");
}

CondensedFtocp::CondensedFtocp(const FtocpSpec& spec) : initial_set_(spec.initial_set) {
  const int nh = spec.horizon_n;
  const TightenedSets& ts = spec.tightened;
  if (nh < 1) throw Error(ErrorKind::config, "horizon must be positive");
  require_dims(ts.horizon_n() == nh && static_cast<int>(ts.state_sets.size()) == nh,
               "tightened sets do not match the horizon");
  require_dims(static_cast<int>(spec.schedule.length()) >= nh, "schedule shorter than the horizon");
  if (nh < ts.horizon_m) throw Error(ErrorKind::config, "horizon N must be at least M");
  n_ = static_cast<int>(spec.schedule.a_seq.front().rows());
  m_ = static_cast<int>(spec.schedule.b_seq.front().cols());
  horizon_n_ = nh;
  spec.cost.validate(n_, m_);
  if (spec.terminal.kind == Terminal::Kind::polytope) {
    if (!spec.terminal.set) throw Error(ErrorKind::config, "polytope terminal without a set");
    require_dims(spec.terminal.set->dim() == n_, "terminal set dimension mismatch");
    if (!contains(*spec.terminal.set, Vec::Zero(n_)))
      throw Error(ErrorKind::config, "terminal set must contain the origin");
  }
  if (initial_set_) require_dims(initial_set_->dim() == n_, "initial set dimension mismatch");

  const int d = nh * m_;
  phi_x_.assign(1, Mat::Identity(n_, n_));
  gamma_.assign(1, Mat::Zero(n_, d));
  for (int j = 0; j < nh; ++j) {
    const Mat& a = spec.schedule.a_seq[j];
    const Mat& b = spec.schedule.b_seq[j];
    phi_x_.push_back(a * phi_x_.back());
    Mat g = a * gamma_.back();
    g.middleCols(j * m_, m_) += b;
    gamma_.push_back(std::move(g));
  }

  const Mat& q = spec.cost.q;
  hessian_ = Mat::Zero(d, d);
  grad_x_ = Mat::Zero(d, n_);
  const_x_ = Mat::Zero(n_, n_);
  for (int j = 0; j < nh; ++j) {
    hessian_ += gamma_[j].transpose() * q * gamma_[j];
    hessian_.block(j * m_, j * m_, m_, m_) += spec.cost.r;
    grad_x_ += gamma_[j].transpose() * q * phi_x_[j];
    const_x_ += phi_x_[j].transpose() * q * phi_x_[j];
  }
  hessian_ = (hessian_ + hessian_.transpose()).eval();
  grad_x_ *= 2.0;

  // Rows: G z <= h + F x0.
  std::vector<Eigen::RowVectorXd> gr;
  std::vector<double> hr;
  std::vector<Eigen::RowVectorXd> fr;
  auto add = [&](const Eigen::RowVectorXd& g, double h, const Eigen::RowVectorXd& f) {
    for (std::size_t k = 0; k < gr.size(); ++k) {
      if (std::abs(hr[k] - h) <= 1e-12 && (gr[k] - g).lpNorm<Eigen::Infinity>() <= 1e-12 &&
          (fr[k] - f).lpNorm<Eigen::Infinity>() <= 1e-12)
        return;
    }
    gr.push_back(g);
    hr.push_back(h);
    fr.push_back(f);
  };
  const Eigen::RowVectorXd zero_x = Eigen::RowVectorXd::Zero(n_);
  for (int j = 0; j < nh; ++j) {
    const PolytopeH& s = ts.input_set(j);
    for (int i = 0; i < s.num_rows(); ++i) {
      Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(d);
      g.segment(j * m_, m_) = s.normals().row(i);
      add(g, s.offsets()(i), zero_x);
    }
  }
  auto add_state = [&](const PolytopeH& s, int j) {
    const Mat g = s.normals() * gamma_[j];
    const Mat f = -s.normals() * phi_x_[j];
    for (int i = 0; i < s.num_rows(); ++i) add(g.row(i), s.offsets()(i), f.row(i));
  };
  for (int j = 1; j < nh; ++j) add_state(ts.state_set(j), j);
  if (spec.terminal.kind == Terminal::Kind::polytope) {
    add_state(ts.state_set(nh), nh);
    add_state(*spec.terminal.set, nh);
    e_ = Mat(0, d);
    l_ = Mat(0, n_);
  } else {
    e_ = gamma_[nh];
    l_ = -phi_x_[nh];
  }
  g_.resize(static_cast<Eigen::Index>(gr.size()), d);
  h_.resize(static_cast<Eigen::Index>(gr.size()));
  f_.resize(static_cast<Eigen::Index>(gr.size()), n_);
  for (std::size_t k = 0; k < gr.size(); ++k) {
    g_.row(static_cast<Eigen::Index>(k)) = gr[k];
    h_(static_cast<Eigen::Index>(k)) = hr[k];
    f_.row(static_cast<Eigen::Index>(k)) = fr[k];
  }
}

QpProblem CondensedFtocp::qp(const Vec& x0) const {
  require_dims(x0.size() == n_, "x0 dimension mismatch");
  QpProblem p;
  p.hessian = hessian_;
  p.gradient = grad_x_ * x0;
  p.constant = x0.dot(const_x_ * x0);
  p.ineq_normals = g_;
  p.ineq_offsets = h_ + f_ * x0;
  p.eq_normals = e_;
  p.eq_offsets = l_ * x0;
  return p;
}

solver::LinearSystem CondensedFtocp::feasibility_system(const Vec& x0) const {
  require_dims(x0.size() == n_, "x0 dimension mismatch");
  return {e_, l_ * x0, g_, h_ + f_ * x0};
}

bool CondensedFtocp::initial_ok(const Vec& x0) const { return !initial_set_ || contains(*initial_set_, x0); }

solver::LinearSystem CondensedFtocp::line_system(const Vec& base, const Vec& dir) const {
  const int d = num_variables();
  const int ri = initial_set_ ? initial_set_->num_rows() : 0;
  solver::LinearSystem sys;
  sys.eq.resize(e_.rows(), d + 1);
  sys.eq.leftCols(d) = e_;
  sys.eq.col(d) = -(l_ * dir);
  sys.eq_rhs = l_ * base;
  sys.ineq.resize(g_.rows() + ri, d + 1);
  sys.ineq_rhs.resize(g_.rows() + ri);
  sys.ineq.topLeftCorner(g_.rows(), d) = g_;
  sys.ineq.col(d).head(g_.rows()) = -(f_ * dir);
  sys.ineq_rhs.head(g_.rows()) = h_ + f_ * base;
  if (ri > 0) {
    sys.ineq.bottomLeftCorner(ri, d).setZero();
    sys.ineq.col(d).tail(ri) = initial_set_->normals() * dir;
    sys.ineq_rhs.tail(ri) = initial_set_->offsets() - initial_set_->normals() * base;
  }
  return sys;
}

std::vector<Vec> CondensedFtocp::predict(const Vec& x0, const Vec& z) const {
  std::vector<Vec> xs;
  for (int j = 0; j <= horizon_n_; ++j) xs.push_back(phi_x_[j] * x0 + gamma_[j] * z);
  return xs;
}

QpProblem assemble(const FtocpSpec& spec, const Vec& x0) { return CondensedFtocp(spec).qp(x0); }

ControlResult control_step(const CondensedFtocp& ftocp, const Vec& x0, const solver::QpOptions& opt) {
  ControlResult out;
  if (!ftocp.initial_ok(x0)) return out;
  out.solution = solver::solve_qp(ftocp.qp(x0), opt);
  out.status = out.solution.status;
  if (out.status == QpStatus::optimal) {
    out.u = out.solution.inputs.head(ftocp.input_dim());
    out.value = out.solution.value;
  }
  return out;
}

ControlResult control_step(const FtocpSpec& spec, const Vec& x0) { return control_step(CondensedFtocp(spec), x0); }

bool is_feasible(const CondensedFtocp& ftocp, const Vec& x0, const Vec* hint, Vec* point) {
  if (!ftocp.initial_ok(x0)) return false;
  const solver::FeasibilityResult r = solver::find_feasible_point(ftocp.feasibility_system(x0), {}, hint);
  if (r.feasible && point != nullptr) *point = r.point;
  return r.feasible;
}

bool is_feasible(const FtocpSpec& spec, const Vec& x0) { return is_feasible(CondensedFtocp(spec), x0); }

namespace {

void write_matrix(std::ostream& os, const char* name, const Mat& m) {
  os << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
    os << '\n';
  }
}

}  // namespace

void dump_qp(std::ostream& os, const QpProblem& qp) {
  const auto old = os.precision(17);
  os << "# minimize 1/2 z'Hz + g'z + c  s.t.  G z <= h,  E z = f\n";
  os << "variables " << qp.num_variables() << "\ninequalities " << qp.num_inequalities() << "\nequalities "
     << qp.num_equalities() << '\n';
  write_matrix(os, "H", qp.hessian);
  write_matrix(os, "g", qp.gradient);
  os << "c " << qp.constant << '\n';
  write_matrix(os, "G", qp.ineq_normals);
  write_matrix(os, "h", qp.ineq_offsets);
  write_matrix(os, "E", qp.eq_normals);
  write_matrix(os, "f", qp.eq_offsets);
  os.precision(old);
}

}  // namespace drmpc
