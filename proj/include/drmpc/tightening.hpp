#pragma once

// Tightened input and state sets for the nominal predictions.
//
// A disturbance realized between x_e and x_{e+1} is cancelled by the inputs
// u_{e+1}, ..., u_{e+M} through the gains of its entry policy. So
//
//   input_sets[j] = U  (-)  sum_{e<j}  K^e_{j-1-e} S_e          (K index < M)
//   state_sets[j] = X  (-)  sum_{e<j}  Phi^e_{j-2-e} S_e        (Phi_{-1} = I, index < M-1)
//
// with S_0 the first-step set (robust: D, lpv: W) and S_e = D (robust) or
// D_theta (lpv) for e >= 1.

#include <vector>

#include "drmpc/deadbeat.hpp"
#include "drmpc/lpv_model.hpp"
#include "drmpc/polytope.hpp"

namespace drmpc {

// How LPV gains relate to the nominal schedule.
//   shared:    one policy from the chain A_0 .. A_{M-1} of the schedule
//   per_entry: entry e uses the chain A_{e+1} .. A_{e+M}
//   frozen:    one policy from (A_bar, B_bar), independent of the schedule
enum class GainPolicy { shared, per_entry, frozen };

const char* to_string(GainPolicy g);
GainPolicy gain_policy_from_string(const std::string& s);

struct TightenedSets {
  std::vector<PolytopeH> input_sets;  // u_0 .. u_{N-1}
  std::vector<PolytopeH> state_sets;  // x_1 .. x_N (state_sets[j-1] holds x_j)
  Mode mode = Mode::robust;
  int horizon_m = 0;

  int horizon_n() const { return static_cast<int>(input_sets.size()); }
  const PolytopeH& input_set(int j) const { return input_sets.at(j); }
  const PolytopeH& state_set(int j) const { return state_sets.at(j - 1); }
};

TightenedSets tighten(const DeadbeatPolicy& policy, const DisturbanceSet& d_set, const DisturbanceSet& w_set,
                      const PolytopeH& u_set, const PolytopeH& x_set, int horizon_n, Mode mode);

// Entry e uses entry_policies[min(e, size - 1)].
TightenedSets tighten(const std::vector<DeadbeatPolicy>& entry_policies, const DisturbanceSet& d_set,
                      const DisturbanceSet& w_set, const PolytopeH& u_set, const PolytopeH& x_set, int horizon_n,
                      Mode mode);

// Entry policies for an LPV schedule. per_entry needs N + M schedule points.
std::vector<DeadbeatPolicy> lpv_entry_policies(const LpvModel& model, const NominalSchedule& schedule,
                                               int horizon_m, int horizon_n, GainPolicy gp,
                                               double rank_tol = kDefaultRankTol);

// Number of schedule points a gain policy needs.
int schedule_points_needed(GainPolicy gp, int horizon_m, int horizon_n);

}  // namespace drmpc
