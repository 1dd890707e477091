#pragma once

#include <vector>

#include "drmpc/common.hpp"

namespace drmpc::solver::detail {

// Working-set bookkeeping for the primal active-set iterations.
struct NullSpace {
  Mat z;            // d x (d - k) orthonormal basis of null([E; G_W])
  Mat q1;           // d x k
  Mat r;            // k x k upper triangular
  bool full = false;
};

inline NullSpace null_space(const Mat& eq, const Mat& ineq, const std::vector<int>& work, int d) {
  const int k = static_cast<int>(eq.rows()) + static_cast<int>(work.size());
  NullSpace ns;
  if (k == 0) {
    ns.z = Mat::Identity(d, d);
    return ns;
  }
  Mat at(d, k);
  if (eq.rows() > 0) at.leftCols(eq.rows()) = eq.transpose();
  for (std::size_t i = 0; i < work.size(); ++i) at.col(eq.rows() + i) = ineq.row(work[i]).transpose();
  Eigen::HouseholderQR<Mat> qr(at);
  Mat q = qr.householderQ();
  ns.q1 = q.leftCols(k);
  ns.z = q.rightCols(d - k);
  ns.r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  ns.full = (k == d);
  return ns;
}

inline bool independent_of(const Mat& eq, const Mat& ineq, const std::vector<int>& work, int d,
                    const Eigen::RowVectorXd& row) {
  const int k = static_cast<int>(eq.rows()) + static_cast<int>(work.size());
  if (k >= d) return false;
  NullSpace ns = null_space(eq, ineq, work, d);
  return (ns.z.transpose() * row.transpose()).norm() > 1e-9 * std::max(1.0, row.norm());
}

}  // namespace drmpc::solver::detail
