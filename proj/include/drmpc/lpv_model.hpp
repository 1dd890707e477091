#pragma once

// Parameter-affine system x+ = A(theta) x + B(theta) u + w with
// A(theta) = A_bar + sum_i theta[i] A^(i), B(theta) = B_bar + sum_i theta[i] B^(i),
// and the conversion of parametric uncertainty into additive disturbance sets.

#include <optional>
#include <utility>
#include <vector>

#include "drmpc/common.hpp"
#include "drmpc/polytope.hpp"

namespace drmpc {

inline constexpr std::size_t kMaxVertexTuples = 20000;

struct LpvModel {
  Mat a_bar;
  MatList a_terms;
  Mat b_bar;
  MatList b_terms;
  PolytopeH theta_set;
  PolytopeH theta_delta_set;
  PolytopeV w_set;
  PolytopeH x_set;
  PolytopeH u_set;

  int n() const { return static_cast<int>(a_bar.rows()); }
  int m() const { return static_cast<int>(b_bar.cols()); }
  int p() const { return static_cast<int>(a_terms.size()); }

  // Dimension consistency and origin containment; throws on failure.
  void validate() const;

  // Copy with Theta_Delta = [-delta, delta]^p.
  LpvModel with_theta_delta(double delta) const;
};

std::pair<Mat, Mat> eval_matrices(const LpvModel& model, const Vec& theta);

struct NominalSchedule {
  std::vector<Vec> theta_bar;
  MatList a_seq;
  MatList b_seq;

  std::size_t length() const { return theta_bar.size(); }
};

// Throws ErrorKind::schedule_invalid naming the first index j >= 1 whose
// theta_bar_j + Theta_Delta leaves Theta.
NominalSchedule make_schedule(const LpvModel& model, const std::vector<Vec>& theta_path, int horizon_n);

// Constant schedule at theta (robust mode uses theta = 0).
NominalSchedule constant_schedule(const LpvModel& model, const Vec& theta, std::size_t length);

// Largest violation of theta + Theta_Delta within Theta (<= 0 means admissible).
double schedule_margin(const LpvModel& model, const Vec& theta);

enum class DisturbanceKind { robust_D, lpv_Dtheta, additive_W };

const char* to_string(DisturbanceKind k);

struct DisturbanceSet {
  PolytopeV set_v;
  DisturbanceKind kind;
};

DisturbanceSet build_additive_set(const LpvModel& model, Mode kind);

inline DisturbanceSet additive_w_set(const LpvModel& model) {
  return {model.w_set, DisturbanceKind::additive_W};
}

}  // namespace drmpc
