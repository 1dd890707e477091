#pragma once

// Deadbeat disturbance-feedback synthesis for a (possibly time-varying)
// nominal chain x_{j+1} = A_j x_j + B_j u_j. With x_0 = d and u_j = K_j d the
// state x_M vanishes for every d.

#include "drmpc/common.hpp"

namespace drmpc {

inline constexpr double kDefaultRankTol = 1e-10;

struct DeadbeatPolicy {
  int horizon_m = 0;
  MatList gains;  // K_0 .. K_{M-1}, each m x n
  MatList phi;    // Phi_0 .. Phi_{M-2}, each n x n
  double residual = 0.0;  // ||Phi_{M-1}||

  int n() const { return gains.empty() ? 0 : static_cast<int>(gains.front().cols()); }
  int m() const { return gains.empty() ? 0 : static_cast<int>(gains.front().rows()); }
};

// [A_{M-1}..A_1 B_0 | A_{M-1}..A_2 B_1 | ... | B_{M-1}]
Mat deadbeat_matrix(const MatList& a_seq, const MatList& b_seq, int horizon_m);

// Smallest M whose deadbeat matrix has numerical rank n (singular values
// above rank_tol times the largest one).
int deadbeat_horizon(const MatList& a_seq, const MatList& b_seq, double rank_tol = kDefaultRankTol);

// Minimum Frobenius-norm gains solving -A_{M-1}..A_0 = P_M [K_0; ...; K_{M-1}].
DeadbeatPolicy solve_gains(const MatList& a_seq, const MatList& b_seq, int horizon_m,
                           double rank_tol = kDefaultRankTol);

// Constant-sequence convenience for the LTI case.
DeadbeatPolicy solve_gains_lti(const Mat& a, const Mat& b, int horizon_m, double rank_tol = kDefaultRankTol);
int deadbeat_horizon_lti(const Mat& a, const Mat& b, double rank_tol = kDefaultRankTol);

// ||x_M|| after simulating x_0 = d0, u_j = K_j d0.
double verify_deadbeat(const DeadbeatPolicy& policy, const MatList& a_seq, const MatList& b_seq, const Vec& d0);

}  // namespace drmpc
