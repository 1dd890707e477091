#include "drmpc/deadbeat.hpp"

#include <string>

namespace drmpc {

namespace {

void check_chain(const MatList& a_seq, const MatList& b_seq, int horizon_m) {
  if (horizon_m < 1) throw Error(ErrorKind::config, "deadbeat horizon must be positive");
  require_dims(static_cast<int>(a_seq.size()) >= horizon_m && static_cast<int>(b_seq.size()) >= horizon_m,
               "matrix sequence shorter than the deadbeat horizon");
  const Eigen::Index n = a_seq.front().rows();
  const Eigen::Index m = b_seq.front().cols();
  for (int j = 0; j < horizon_m; ++j) {
    require_dims(a_seq[j].rows() == n && a_seq[j].cols() == n, "A sequence entries must be n x n");
    require_dims(b_seq[j].rows() == n && b_seq[j].cols() == m, "B sequence entries must be n x m");
  }
}

int numerical_rank(const Mat& p, double rank_tol) {
  Eigen::JacobiSVD<Mat> svd(p);
  const Vec& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rank_tol * s(0)) ++rank;
  return rank;
}

}  // namespace

Mat deadbeat_matrix(const MatList& a_seq, const MatList& b_seq, int horizon_m) {
  check_chain(a_seq, b_seq, horizon_m);
  const Eigen::Index n = a_seq.front().rows();
  const Eigen::Index m = b_seq.front().cols();
  Mat p(n, m * horizon_m);
  Mat tail = Mat::Identity(n, n);  // A_{M-1} .. A_{i+1}
  for (int i = horizon_m - 1; i >= 0; --i) {
    p.middleCols(i * m, m) = tail * b_seq[i];
    tail = tail * a_seq[i];
  }
  return p;
}

int deadbeat_horizon(const MatList& a_seq, const MatList& b_seq, double rank_tol) {
  if (!(rank_tol > 0.0)) throw Error(ErrorKind::config, "rank tolerance must be positive");
  if (a_seq.empty() || b_seq.empty()) throw Error(ErrorKind::dimension, "empty matrix sequence");
  const int len = static_cast<int>(std::min(a_seq.size(), b_seq.size()));
  const int n = static_cast<int>(a_seq.front().rows());
  for (int m = 1; m <= len; ++m)
    if (numerical_rank(deadbeat_matrix(a_seq, b_seq, m), rank_tol) == n) return m;
  throw Error(ErrorKind::uncontrollable,
              "deadbeat matrix never reaches rank " + std::to_string(n) + " within " + std::to_string(len) + " steps");
}

DeadbeatPolicy solve_gains(const MatList& a_seq, const MatList& b_seq, int horizon_m, double rank_tol) {
  const Mat p = deadbeat_matrix(a_seq, b_seq, horizon_m);
  const Eigen::Index n = p.rows();
  const Eigen::Index m = b_seq.front().cols();
  if (numerical_rank(p, rank_tol) < n)
    throw Error(ErrorKind::synthesis, "deadbeat matrix is rank deficient at M = " + std::to_string(horizon_m) +
                                          "; try a larger M");
  Mat chain = Mat::Identity(n, n);
  for (int i = 0; i < horizon_m; ++i) chain = a_seq[i] * chain;

  Eigen::CompleteOrthogonalDecomposition<Mat> cod(p);
  const Mat k_stack = cod.solve(Mat(-chain));

  DeadbeatPolicy pol;
  pol.horizon_m = horizon_m;
  for (int i = 0; i < horizon_m; ++i) pol.gains.push_back(k_stack.middleRows(i * m, m));
  Mat phi = Mat::Identity(n, n);
  for (int j = 0; j < horizon_m; ++j) {
    phi = a_seq[j] * phi + b_seq[j] * pol.gains[j];
    if (j < horizon_m - 1) pol.phi.push_back(phi);
  }
  pol.residual = phi.norm();
  return pol;
}

DeadbeatPolicy solve_gains_lti(const Mat& a, const Mat& b, int horizon_m, double rank_tol) {
  return solve_gains(MatList(horizon_m, a), MatList(horizon_m, b), horizon_m, rank_tol);
}

int deadbeat_horizon_lti(const Mat& a, const Mat& b, double rank_tol) {
  const int n = static_cast<int>(a.rows());
  return deadbeat_horizon(MatList(n, a), MatList(n, b), rank_tol);
}

double verify_deadbeat(const DeadbeatPolicy& policy, const MatList& a_seq, const MatList& b_seq, const Vec& d0) {
  check_chain(a_seq, b_seq, policy.horizon_m);
  Vec x = d0;
  for (int j = 0; j < policy.horizon_m; ++j) x = a_seq[j] * x + b_seq[j] * (policy.gains[j] * d0);
  return x.norm();
}

}  // namespace drmpc
