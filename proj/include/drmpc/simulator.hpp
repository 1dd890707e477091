#pragma once

// Closed-loop simulation of the true uncertain system under the receding
// horizon law, with the recursive-feasibility (shift candidate) and value
// decrease monitors evaluated online.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "drmpc/ftocp.hpp"

namespace drmpc {

enum class DisturbanceMode { zero, vertices, uniform };
enum class ParameterMode { constant, random_walk, replay };

const char* to_string(DisturbanceMode m);
const char* to_string(ParameterMode m);
DisturbanceMode disturbance_mode_from_string(const std::string& s);
ParameterMode parameter_mode_from_string(const std::string& s);

struct Monitors {
  bool shift_candidate = true;
  bool value_decrease = true;
};

struct SimConfig {
  int steps = 100;
  std::uint64_t seed = 1;
  DisturbanceMode disturbance_mode = DisturbanceMode::vertices;
  ParameterMode parameter_mode = ParameterMode::random_walk;
  Vec theta_constant;               // constant mode (defaults to 0)
  double delta_max = 0.1;           // random walk step bound
  std::vector<Vec> replay_path;     // replay mode
  Monitors monitors;
  int disturbance_off_after = -1;   // >= 0: zero disturbances from this step on
};

struct ControllerConfig {
  Mode mode = Mode::robust;
  int horizon_n = 6;
  int horizon_m = 3;
  StageCost cost;
  Terminal terminal;
  GainPolicy gain_policy = GainPolicy::per_entry;  // lpv mode only
  double rank_tol = kDefaultRankTol;
  // Test hook: multiplies K_0 of every synthesized policy.
  double gain0_scale = 1.0;
};

struct MonitorReport {
  bool shift_checked = false;
  bool shift_ok = true;
  double shift_margin = 0.0;  // largest constraint violation of the candidate (<= 0 ok)
  double disturbance_norm = 0.0;
};

struct SimTrace {
  std::vector<Vec> states;        // x_0 .. x_K
  std::vector<Vec> inputs;        // u_0 .. u_{K-1}
  std::vector<Vec> thetas;        // realized theta_k
  std::vector<Vec> theta_bars;    // nominal theta_bar_k (lpv), theta_k (robust)
  std::vector<Vec> disturbances;  // additive w_k
  std::vector<double> values;     // V*_N(x_k)
  std::vector<double> stage_costs;
  std::vector<QpStatus> statuses;
  std::vector<MonitorReport> monitors;  // monitors[k] judges the step k -> k+1
  bool initial_infeasible = false;
  bool recursive_feasibility_violation = false;
  int infeasible_steps = 0;

  std::size_t steps() const { return inputs.size(); }
  bool all_shift_ok() const;
};

// Shared offline data; built once per (model, controller).

struct Controller {
  struct Step {
    NominalSchedule schedule;
    std::vector<DeadbeatPolicy> policies;
    std::vector<DeadbeatPolicy> candidate_policies;  // policies, unless gain0_scale != 1
    TightenedSets sets;
    FtocpSpec spec;
    std::shared_ptr<const CondensedFtocp> ftocp;
  };

  LpvModel model;
  ControllerConfig config;
  DisturbanceSet d_set;
  DisturbanceSet w_set;
  std::optional<Step> robust_step;

  Controller(LpvModel model, ControllerConfig config);

  // Nominal schedule points needed per step.
  int schedule_points() const;
  // Everything the online solve needs for a given schedule (lpv mode).
  Step build_step(const NominalSchedule& schedule) const;
  // State constraint on x_0 for closed-loop runs.
  PolytopeH initial_set() const { return model.x_set; }
};

// Candidate for the next step built from the current optimum.
struct ShiftCheck {
  bool ok = false;
  double margin = 0.0;
  double terminal_norm = 0.0;
  double disturbance_norm = 0.0;
  Vec candidate;
};

// Robust: d = x_next - A_bar x - B_bar u.
ShiftCheck shift_candidate_check(const Controller::Step& now, const Vec& z_opt, const Vec& x_now, const Vec& u_now,
                                 const Vec& x_next, const Controller::Step& next);
// LPV: additionally needs the true matrices at theta_k.
ShiftCheck shift_candidate_check_lpv(const Controller::Step& now, const Vec& z_opt, const Mat& a_true,
                                     const Mat& b_true, const Vec& x_now, const Vec& u_now, const Vec& x_next,
                                     const Controller::Step& next);

SimTrace run_closed_loop(const Controller& ctrl, const Vec& x0, const SimConfig& config);

struct ValueReport {
  int checked_zero = 0;
  int violations_zero = 0;
  double worst_zero_slack = 0.0;  // max of V+ - V + l over zero-disturbance steps
  int checked_disturbed = 0;
  double sigma_observed = 0.0;    // max excess / ||d||
  bool sigma_ok = true;           // excess <= sigma_cal ||d|| (+1e-6) when sigma_cal > 0
};

ValueReport value_decrease_check(const SimTrace& trace, double sigma_cal);

// Random walk inside Theta shrunk by [-delta_max, delta_max]^p; steps
// uniform in [-delta_max, delta_max]^p, coordinates clamped.
std::vector<Vec> sample_parameter_path(const PolytopeH& theta_set, double delta_max, int length, std::uint64_t seed);

void write_trace_csv(std::ostream& os, const SimTrace& trace);

}  // namespace drmpc
