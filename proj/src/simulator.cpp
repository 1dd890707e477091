#include "drmpc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

namespace drmpc {

const char* to_string(DisturbanceMode m) {
  switch (m) {
    case DisturbanceMode::zero: return "zero";
    case DisturbanceMode::vertices: return "vertices";
    case DisturbanceMode::uniform: return "uniform";
  }
  return "unknown";
}

const char* to_string(ParameterMode m) {
  switch (m) {
    case ParameterMode::constant: return "constant";
    case ParameterMode::random_walk: return "random_walk";
    case ParameterMode::replay: return "replay";
  }
  return "unknown";
}

DisturbanceMode disturbance_mode_from_string(const std::string& s) {
  if (s == "zero") return DisturbanceMode::zero;
  if (s == "vertices") return DisturbanceMode::vertices;
  if (s == "uniform") return DisturbanceMode::uniform;
  throw Error(ErrorKind::config, "unknown disturbance mode '" + s + "'");
}

ParameterMode parameter_mode_from_string(const std::string& s) {
  if (s == "constant") return ParameterMode::constant;
  if (s == "random_walk") return ParameterMode::random_walk;
  if (s == "replay") return ParameterMode::replay;
  throw Error(ErrorKind::config, "unknown parameter mode '" + s + "'");
}

bool SimTrace::all_shift_ok() const {
  return std::all_of(monitors.begin(), monitors.end(), [](const MonitorReport& r) { return r.shift_ok; });
}

namespace {

std::vector<DeadbeatPolicy> scaled(std::vector<DeadbeatPolicy> pols, double s) {
  if (s != 1.0)
    for (DeadbeatPolicy& p : pols) p.gains[0] *= s;
  return pols;
}

Controller::Step finish_step(const Controller& c, NominalSchedule schedule, std::vector<DeadbeatPolicy> pols,
                             Mode mode) {
  Controller::Step st;
  st.sets = tighten(pols, c.d_set, c.w_set, c.model.u_set, c.model.x_set, c.config.horizon_n, mode);
  st.candidate_policies = scaled(pols, c.config.gain0_scale);
  st.policies = std::move(pols);
  st.schedule = std::move(schedule);
  st.spec = FtocpSpec{st.schedule, st.sets, c.config.cost, c.config.horizon_n, c.config.terminal, c.initial_set()};
  st.ftocp = std::make_shared<const CondensedFtocp>(st.spec);
  return st;
}

const DeadbeatPolicy& entry(const std::vector<DeadbeatPolicy>& pols, int e) {
  return pols[std::min<std::size_t>(static_cast<std::size_t>(e), pols.size() - 1)];
}

struct Correction {
  const DeadbeatPolicy* policy;
  Vec d;
  int shift;
};

Vec candidate_input(const Vec& z_opt, int m, int horizon_n, int i, const std::vector<Correction>& corr) {
  Vec u = i + 1 < horizon_n ? Vec(z_opt.segment((i + 1) * m, m)) : Vec(Vec::Zero(m));
  for (const Correction& c : corr) {
    const int idx = i - c.shift;
    if (idx >= 0 && idx < c.policy->horizon_m) u += c.policy->gains[idx] * c.d;
  }
  return u;
}

double violation(const PolytopeH& p, const Vec& x) { return (p.normals() * x - p.offsets()).maxCoeff(); }

double scale_of(const PolytopeH& p) { return std::max(1.0, p.offsets().lpNorm<Eigen::Infinity>()); }

ShiftCheck evaluate_candidate(const Controller::Step& next, const Vec& z_opt, const Vec& x_next,
                              const std::vector<Correction>& corr) {
  ShiftCheck out;
  const int nh = next.spec.horizon_n;
  const int m = static_cast<int>(next.schedule.b_seq.front().cols());
  out.candidate.resize(nh * m);
  double margin = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < nh; ++i) {
    const Vec u = candidate_input(z_opt, m, nh, i, corr);
    out.candidate.segment(i * m, m) = u;
    const PolytopeH& s = next.sets.input_set(i);
    margin = std::max(margin, violation(s, u) / scale_of(s));
  }
  Vec x = x_next;
  if (next.spec.initial_set) margin = std::max(margin, violation(*next.spec.initial_set, x) / scale_of(*next.spec.initial_set));
  for (int j = 0; j < nh; ++j) {
    x = next.schedule.a_seq[j] * x + next.schedule.b_seq[j] * out.candidate.segment(j * m, m);
    const bool last = j + 1 == nh;
    if (!last || next.spec.terminal.kind == Terminal::Kind::polytope) {
      const PolytopeH& s = next.sets.state_set(j + 1);
      margin = std::max(margin, violation(s, x) / scale_of(s));
    }
  }
  if (next.spec.terminal.kind == Terminal::Kind::polytope) {
    const PolytopeH& s = *next.spec.terminal.set;
    margin = std::max(margin, violation(s, x) / scale_of(s));
    out.terminal_norm = 0.0;
  } else {
    out.terminal_norm = x.norm();
  }
  out.margin = margin;
  out.ok = margin <= 1e-8 && out.terminal_norm <= 1e-8;
  return out;
}

Vec pick_vertex(const std::vector<Vec>& verts, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, verts.size() - 1);
  return verts[pick(rng)];
}

template <typename Inside>
Vec uniform_in_box(const Vec& lo, const Vec& hi, std::mt19937_64& rng, Inside inside, const Vec& fallback) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vec x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) x(i) = lo(i) + (hi(i) - lo(i)) * u01(rng);
    if (inside(x)) return x;
  }
  return fallback;
}

// Draws from a vertex list (the set is their hull).
struct Sampler {
  std::vector<Vec> verts;
  Vec lo, hi;
  std::optional<PolytopeH> h;
  std::optional<PolytopeV> v;

  explicit Sampler(const PolytopeH& p) : verts(vertices_of(p).vertices()), h(p) { bounds(); }
  explicit Sampler(const PolytopeV& p) : verts(p.vertices()), v(p) { bounds(); }

  void bounds() {
    lo = hi = verts.front();
    for (const Vec& x : verts) {
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
    }
  }

  Vec draw(DisturbanceMode mode, std::mt19937_64& rng) const {
    switch (mode) {
      case DisturbanceMode::zero: return Vec::Zero(lo.size());
      case DisturbanceMode::vertices: return pick_vertex(verts, rng);
      case DisturbanceMode::uniform:
        if ((hi - lo).maxCoeff() == 0.0) return lo;
        if (h) return uniform_in_box(lo, hi, rng, [&](const Vec& x) { return contains(*h, x); }, verts.front());
        return uniform_in_box(lo, hi, rng, [&](const Vec& x) { return contains(*v, x); }, verts.front());
    }
    return Vec::Zero(lo.size());
  }
};

}  // namespace

Controller::Controller(LpvModel m, ControllerConfig c)
    : model(std::move(m)),
      config(std::move(c)),
      d_set(build_additive_set(model, config.mode)),
      w_set(additive_w_set(model)) {
  model.validate();
  if (config.horizon_n < config.horizon_m) throw Error(ErrorKind::config, "horizon N must be at least M");
  if (config.mode == Mode::lpv && config.gain_policy == GainPolicy::per_entry && config.horizon_n < config.horizon_m + 1)
    throw Error(ErrorKind::config, "per-entry LPV control needs N >= M + 1");
  config.cost.validate(model.n(), model.m());
  if (config.mode == Mode::robust) {
    std::vector<DeadbeatPolicy> pols{solve_gains_lti(model.a_bar, model.b_bar, config.horizon_m, config.rank_tol)};
    robust_step = finish_step(*this, constant_schedule(model, Vec::Zero(model.p()), config.horizon_n + 1),
                              std::move(pols), Mode::robust);
  }
}

int Controller::schedule_points() const {
  return schedule_points_needed(config.gain_policy, config.horizon_m, config.horizon_n);
}

Controller::Step Controller::build_step(const NominalSchedule& schedule) const {
  if (config.mode == Mode::robust) return *robust_step;
  return finish_step(*this, schedule,
                     lpv_entry_policies(model, schedule, config.horizon_m, config.horizon_n, config.gain_policy,
                                        config.rank_tol),
                     Mode::lpv);
}

ShiftCheck shift_candidate_check(const Controller::Step& now, const Vec& z_opt, const Vec& x_now, const Vec& u_now,
                                 const Vec& x_next, const Controller::Step& next) {
  const Vec d = x_next - now.schedule.a_seq[0] * x_now - now.schedule.b_seq[0] * u_now;
  ShiftCheck out = evaluate_candidate(next, z_opt, x_next, {{&entry(now.candidate_policies, 0), d, 0}});
  out.disturbance_norm = d.norm();
  return out;
}

ShiftCheck shift_candidate_check_lpv(const Controller::Step& now, const Vec& z_opt, const Mat& a_true,
                                     const Mat& b_true, const Vec& x_now, const Vec& u_now, const Vec& x_next,
                                     const Controller::Step& next) {
  const int m = static_cast<int>(u_now.size());
  const Vec w0 = x_next - a_true * x_now - b_true * u_now;
  const DeadbeatPolicy& k0 = entry(now.candidate_policies, 0);
  const DeadbeatPolicy& k1 = entry(now.candidate_policies, 1);
  const Vec u0 = candidate_input(z_opt, m, now.spec.horizon_n, 0, {{&k0, w0, 0}});
  const Vec d1 = (next.schedule.a_seq[0] - now.schedule.a_seq[1]) * x_next +
                 (next.schedule.b_seq[0] - now.schedule.b_seq[1]) * u0;
  ShiftCheck out = evaluate_candidate(next, z_opt, x_next, {{&k0, w0, 0}, {&k1, d1, 1}});
  out.disturbance_norm = w0.norm() + d1.norm();
  return out;
}

std::vector<Vec> sample_parameter_path(const PolytopeH& theta_set, double delta_max, int length, std::uint64_t seed) {
  if (!(delta_max >= 0.0)) throw Error(ErrorKind::config, "delta_max must be nonnegative");
  if (length < 1) throw Error(ErrorKind::config, "path length must be positive");
  const int p = theta_set.dim();
  const PolytopeV box = vertices_of(PolytopeH::box(Vec::Constant(p, -delta_max), Vec::Constant(p, delta_max)));
  const PolytopeH shrunk = pontryagin_diff(theta_set, box);
  if (is_empty(shrunk)) throw Error(ErrorKind::schedule_invalid, "Theta shrunk by Theta_Delta is empty");
  const std::vector<Vec> sv = vertices_of(shrunk).vertices();
  Vec lo = sv.front(), hi = sv.front();
  for (const Vec& v : sv) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Vec center = Vec::Zero(p);
  for (const Vec& v : sv) center += v;
  center /= static_cast<double>(sv.size());
  Vec theta = uniform_in_box(lo, hi, rng, [&](const Vec& x) { return contains(shrunk, x); }, center);
  std::vector<Vec> path{theta};
  while (static_cast<int>(path.size()) < length) {
    Vec next = theta;
    for (int i = 0; i < p; ++i) next(i) += delta_max * (2.0 * u01(rng) - 1.0);
    next = next.cwiseMax(lo).cwiseMin(hi);
    if (contains(shrunk, next)) theta = next;
    path.push_back(theta);
  }
  return path;
}

SimTrace run_closed_loop(const Controller& ctrl, const Vec& x0, const SimConfig& cfg) {
  SimTrace tr;
  const LpvModel& model = ctrl.model;
  const bool lpv = ctrl.config.mode == Mode::lpv;
  const int p = model.p();
  std::mt19937_64 rng(cfg.seed);
  const Sampler w_sampler(model.w_set);
  const Sampler theta_sampler(model.theta_set);
  const Sampler dtheta_sampler(model.theta_delta_set);

  const int points = ctrl.schedule_points();
  const int path_len = cfg.steps + points + 1;
  std::vector<Vec> nominal;
  if (lpv) {
    switch (cfg.parameter_mode) {
      case ParameterMode::constant:
        nominal.assign(path_len, cfg.theta_constant.size() == p ? cfg.theta_constant : Vec(Vec::Zero(p)));
        break;
      case ParameterMode::random_walk:
        nominal = sample_parameter_path(model.theta_set, cfg.delta_max, path_len, rng());
        break;
      case ParameterMode::replay:
        if (static_cast<int>(cfg.replay_path.size()) < path_len)
          throw Error(ErrorKind::config, "replay path needs " + std::to_string(path_len) + " points");
        nominal = cfg.replay_path;
        break;
    }
  }
  auto disturbed = [&](int k) { return cfg.disturbance_off_after < 0 || k < cfg.disturbance_off_after; };
  auto draw_theta_true = [&](int k) -> Vec {
    const DisturbanceMode mode = disturbed(k) ? cfg.disturbance_mode : DisturbanceMode::zero;
    if (lpv) return nominal[k] + dtheta_sampler.draw(mode, rng);
    if (mode == DisturbanceMode::zero) return Vec::Zero(p);
    return theta_sampler.draw(mode, rng);
  };
  auto step_for = [&](int k, const Vec& theta_k) {
    if (!lpv) return *ctrl.robust_step;
    std::vector<Vec> pts(nominal.begin() + k, nominal.begin() + k + points);
    pts[0] = theta_k;
    return ctrl.build_step(make_schedule(model, pts, ctrl.config.horizon_n));
  };

  Vec x = x0;
  Vec theta = lpv ? draw_theta_true(0) : Vec(Vec::Zero(p));
  tr.states.push_back(x);
  Controller::Step step = step_for(0, theta);
  if (!is_feasible(*step.ftocp, x)) {
    tr.initial_infeasible = true;
    tr.statuses.push_back(QpStatus::infeasible);
    return tr;
  }

  for (int k = 0; k < cfg.steps; ++k) {
    const ControlResult res = control_step(*step.ftocp, x);
    tr.statuses.push_back(res.status);
    if (res.status != QpStatus::optimal) {
      ++tr.infeasible_steps;
      tr.recursive_feasibility_violation = true;
      break;
    }
    if (!lpv) theta = draw_theta_true(k);
    const auto [a_true, b_true] = eval_matrices(model, theta);
    const Vec w = disturbed(k) ? w_sampler.draw(cfg.disturbance_mode, rng) : Vec(Vec::Zero(model.n()));
    const Vec x_next = a_true * x + b_true * res.u + w;

    tr.inputs.push_back(res.u);
    tr.thetas.push_back(theta);
    tr.theta_bars.push_back(lpv ? nominal[k] : theta);
    tr.disturbances.push_back(w);
    tr.values.push_back(res.value);
    tr.stage_costs.push_back(ctrl.config.cost(x, res.u));

    Vec theta_next = lpv ? draw_theta_true(k + 1) : Vec(Vec::Zero(p));
    Controller::Step next = step_for(k + 1, theta_next);

    MonitorReport rep;
    ShiftCheck sc = lpv ? shift_candidate_check_lpv(step, res.solution.inputs, a_true, b_true, x, res.u, x_next, next)
                        : shift_candidate_check(step, res.solution.inputs, x, res.u, x_next, next);
    rep.disturbance_norm = sc.disturbance_norm;
    if (cfg.monitors.shift_candidate) {
      rep.shift_checked = true;
      rep.shift_ok = sc.ok;
      rep.shift_margin = sc.margin;
    }
    tr.monitors.push_back(rep);

    x = x_next;
    theta = theta_next;
    step = std::move(next);
    tr.states.push_back(x);
  }
  return tr;
}

ValueReport value_decrease_check(const SimTrace& tr, double sigma_cal) {
  ValueReport rep;
  for (std::size_t k = 0; k + 1 < tr.values.size(); ++k) {
    if (tr.statuses[k] != QpStatus::optimal || tr.statuses[k + 1] != QpStatus::optimal) continue;
    const double excess = tr.values[k + 1] - tr.values[k] + tr.stage_costs[k];
    const double dn = tr.monitors[k].disturbance_norm;
    if (dn <= 1e-12) {
      ++rep.checked_zero;
      rep.worst_zero_slack = std::max(rep.worst_zero_slack, excess);
      if (excess > 1e-6) ++rep.violations_zero;
    } else {
      ++rep.checked_disturbed;
      rep.sigma_observed = std::max(rep.sigma_observed, excess / dn);
      if (sigma_cal > 0.0 && excess > sigma_cal * dn + 1e-6) rep.sigma_ok = false;
    }
  }
  return rep;
}

void write_trace_csv(std::ostream& os, const SimTrace& tr) {
  const auto old = os.precision(17);
  const std::size_t n = tr.states.empty() ? 0 : static_cast<std::size_t>(tr.states.front().size());
  const std::size_t m = tr.inputs.empty() ? 0 : static_cast<std::size_t>(tr.inputs.front().size());
  const std::size_t p = tr.thetas.empty() ? 0 : static_cast<std::size_t>(tr.thetas.front().size());
  os << "k";
  for (std::size_t i = 0; i < n; ++i) os << ",x" << i;
  for (std::size_t i = 0; i < m; ++i) os << ",u" << i;
  for (std::size_t i = 0; i < p; ++i) os << ",theta" << i;
  for (std::size_t i = 0; i < n; ++i) os << ",w" << i;
  os << ",value,status,shift_checked,shift_ok,shift_margin\n";
  for (std::size_t k = 0; k < tr.inputs.size(); ++k) {
    os << k;
    for (std::size_t i = 0; i < n; ++i) os << ',' << tr.states[k](static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < m; ++i) os << ',' << tr.inputs[k](static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < p; ++i) os << ',' << tr.thetas[k](static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < n; ++i) os << ',' << tr.disturbances[k](static_cast<Eigen::Index>(i));
    const MonitorReport& r = tr.monitors[k];
    os << ',' << tr.values[k] << ',' << solver::to_string(tr.statuses[k]) << ',' << r.shift_checked << ','
       << r.shift_ok << ',' << r.shift_margin << '\n';
  }
  os.precision(old);
}

}  // namespace drmpc
