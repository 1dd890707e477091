#include "drmpc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

namespace drmpc::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::config, std::string("config key '") + key + "': " + e.what());
  }
}

std::string resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? p : (base / path).string();
}

SweepMethod sweep_method_from_string(const std::string& s) {
  if (s == "pointwise") return SweepMethod::pointwise;
  if (s == "row_interval") return SweepMethod::row_interval;
  throw Error(ErrorKind::config, "unknown sweep method '" + s + "'");
}

Mode mode_from_string(const std::string& s) {
  if (s == "robust") return Mode::robust;
  if (s == "lpv") return Mode::lpv;
  throw Error(ErrorKind::config, "unknown mode '" + s + "'");
}

}  // namespace

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::infeasible:
    case ErrorKind::tightening_infeasible:
      return 2;
    case ErrorKind::numerical:
    case ErrorKind::uncontrollable:
    case ErrorKind::synthesis:
      return 3;
    default:
      return 4;
  }
}

RunConfig load_run_config(const std::string& path) {
  const Json j = io::read_json_file(path);
  const fs::path base = fs::path(path).parent_path();
  RunConfig c;
  c.raw = j;
  if (!j.contains("model")) throw Error(ErrorKind::config, "config: missing key 'model'");
  c.model_path = resolve(base, j.at("model").get<std::string>());
  c.mode = mode_from_string(get_or<std::string>(j, "mode", "robust"));
  c.horizon_n = get_or<int>(j, "horizon_n", 6);
  if (j.contains("deadbeat_m")) c.deadbeat_m = j.at("deadbeat_m").get<int>();
  if (c.deadbeat_m && c.horizon_n < *c.deadbeat_m) throw Error(ErrorKind::config, "horizon_n must be >= deadbeat_m");
  if (j.contains("cost")) {
    c.cost.q = io::matrix_from_json(j.at("cost").at("q"), "cost.q");
    c.cost.r = io::matrix_from_json(j.at("cost").at("r"), "cost.r");
  }
  if (j.contains("terminal")) {
    const Json& t = j.at("terminal");
    if (t.is_string() && t.get<std::string>() == "origin") {
      c.terminal = Terminal::origin();
    } else if (t.is_object() && t.contains("polytope")) {
      const std::string tp = resolve(base, t.at("polytope").get<std::string>());
      c.terminal = Terminal::polytope(io::polytope_h_from_json(io::read_json_file(tp), "terminal"));
    } else {
      throw Error(ErrorKind::config, "terminal must be \"origin\" or {\"polytope\": path}");
    }
  }
  c.gain_policy = gain_policy_from_string(get_or<std::string>(j, "gain_policy", "per_entry"));
  c.rank_tol = get_or<double>(j, "rank_tol", kDefaultRankTol);
  if (j.contains("delta_max")) c.delta_max = j.at("delta_max").get<double>();
  c.seed = get_or<std::uint64_t>(j, "seed", 1);
  c.output_dir = resolve(base, get_or<std::string>(j, "output_dir", "out"));

  const Json sim = j.value("sim", Json::object());
  c.sim.steps = get_or<int>(sim, "steps", 100);
  c.sim.disturbance_mode = disturbance_mode_from_string(get_or<std::string>(sim, "disturbance_mode", "vertices"));
  c.sim.parameter_mode = parameter_mode_from_string(get_or<std::string>(sim, "parameter_mode", "random_walk"));
  if (sim.contains("theta_constant")) c.sim.theta_constant = io::vector_from_json(sim.at("theta_constant"), "sim.theta_constant");
  c.sim.delta_max = c.delta_max.value_or(get_or<double>(sim, "delta_max", 0.1));
  if (sim.contains("replay_path"))
    for (const Json& p : sim.at("replay_path")) c.sim.replay_path.push_back(io::vector_from_json(p, "sim.replay_path"));
  if (sim.contains("monitors")) {
    c.sim.monitors.shift_candidate = get_or<bool>(sim.at("monitors"), "shift_candidate", true);
    c.sim.monitors.value_decrease = get_or<bool>(sim.at("monitors"), "value_decrease", true);
  }
  c.sim.disturbance_off_after = get_or<int>(sim, "disturbance_off_after", -1);
  if (sim.contains("x0")) c.x0 = io::vector_from_json(sim.at("x0"), "sim.x0");

  const Json roa = j.value("roa", Json::object());
  c.roa.points_per_axis = get_or<int>(roa, "points_per_axis", 121);
  c.roa.horizons = get_or<std::vector<int>>(roa, "horizons", c.roa.horizons);
  c.roa.method = sweep_method_from_string(get_or<std::string>(roa, "method", "pointwise"));
  c.roa.threads = get_or<int>(roa, "threads", 1);

  const Json ex = j.value("experiment", Json::object());
  c.experiment.horizons = get_or<std::vector<int>>(ex, "horizons", c.experiment.horizons);
  c.experiment.deltas = get_or<std::vector<double>>(ex, "deltas", c.experiment.deltas);
  c.experiment.realizations = get_or<int>(ex, "realizations", 20);
  c.experiment.gain_policy = gain_policy_from_string(get_or<std::string>(ex, "gain_policy", "shared"));
  return c;
}

namespace {

struct Context {
  RunConfig cfg;
  LpvModel model;
  std::string config_hash;
  std::optional<std::string> dump_qp;
  bool strict = false;

  Json meta(const char* command) const {
    Json j = {{"command", command}, {"config_hash", config_hash}, {"seed", cfg.seed}, {"mode", to_string(cfg.mode)},
              {"gain_policy", to_string(cfg.gain_policy)}};
    if (cfg.mode == Mode::lpv)
      j["theta_realization"] = std::string("theta_bar + dtheta, dtheta ") + to_string(cfg.sim.disturbance_mode) +
                               " in Theta_Delta";
    return j;
  }
  std::string out(const std::string& name) const { return (fs::path(cfg.output_dir) / name).string(); }
  std::string csv_header() const { return "# config_hash=" + config_hash + " seed=" + std::to_string(cfg.seed) + "\n"; }

  StageCost cost() const {
    if (cfg.cost.q.size() > 0) return cfg.cost;
    return {Mat::Identity(model.n(), model.n()), Mat::Identity(model.m(), model.m())};
  }

  int horizon_m() const {
    return cfg.deadbeat_m ? *cfg.deadbeat_m : deadbeat_horizon_lti(model.a_bar, model.b_bar, cfg.rank_tol);
  }

  ControllerConfig controller_config() const {
    ControllerConfig cc;
    cc.mode = cfg.mode;
    cc.horizon_n = cfg.horizon_n;
    cc.horizon_m = horizon_m();
    cc.cost = cost();
    cc.terminal = cfg.terminal;
    cc.gain_policy = cfg.gain_policy;
    cc.rank_tol = cfg.rank_tol;
    return cc;
  }

  // Nominal parameter path for single-schedule commands (sets, roa, dump).
  std::vector<Vec> nominal_path(int length) const {
    const int p = model.p();
    switch (cfg.sim.parameter_mode) {
      case ParameterMode::constant:
        return std::vector<Vec>(length, cfg.sim.theta_constant.size() == p ? cfg.sim.theta_constant : Vec(Vec::Zero(p)));
      case ParameterMode::replay:
        if (static_cast<int>(cfg.sim.replay_path.size()) < length)
          throw Error(ErrorKind::config, "replay path needs " + std::to_string(length) + " points");
        return cfg.sim.replay_path;
      case ParameterMode::random_walk:
        break;
    }
    return sample_parameter_path(model.theta_set, cfg.sim.delta_max, length, cfg.seed);
  }

  struct Offline {
    NominalSchedule schedule;
    std::vector<DeadbeatPolicy> policies;
  };

  Offline offline(int horizon_n, GainPolicy gp) const {
    const int mm = horizon_m();
    if (cfg.mode == Mode::robust)
      return {constant_schedule(model, Vec::Zero(model.p()), horizon_n + 1),
              {solve_gains_lti(model.a_bar, model.b_bar, mm, cfg.rank_tol)}};
    const int len = schedule_points_needed(gp, mm, horizon_n);
    NominalSchedule s = make_schedule(model, nominal_path(len), horizon_n);
    auto pols = lpv_entry_policies(model, s, mm, horizon_n, gp, cfg.rank_tol);
    return {std::move(s), std::move(pols)};
  }

  void maybe_dump(const QpProblem& qp) const {
    if (!dump_qp) return;
    std::ofstream os(*dump_qp);
    if (!os) throw Error(ErrorKind::config, "cannot write '" + *dump_qp + "'");
    drmpc::dump_qp(os, qp);
    std::cout << "QP written to " << *dump_qp << '\n';
  }
};

double norm_of(const Mat& m) { return m.norm(); }

int cmd_gains(const Context& ctx) {
  const int minimal = deadbeat_horizon_lti(ctx.model.a_bar, ctx.model.b_bar, ctx.cfg.rank_tol);
  const Context::Offline off = ctx.offline(ctx.cfg.horizon_n, ctx.cfg.gain_policy);
  Json pols = Json::array();
  for (const DeadbeatPolicy& p : off.policies) pols.push_back(io::to_json(p));
  Json out = {{"meta", ctx.meta("gains")}, {"minimal_m", minimal}, {"policies", pols}};
  out["policy"] = pols.front();
  io::write_json_file(ctx.out("policy.json"), out);
  const DeadbeatPolicy& p = off.policies.front();
  std::cout << "minimal M = " << minimal << ", used M = " << p.horizon_m << '\n';
  double worst = 0.0;
  for (const DeadbeatPolicy& q : off.policies) worst = std::max(worst, q.residual);
  std::cout << "residual = " << std::scientific << std::setprecision(3) << worst << std::defaultfloat << '\n';
  for (int i = 0; i < p.horizon_m; ++i) std::cout << "||K_" << i << "|| = " << norm_of(p.gains[i]) << '\n';
  std::cout << "wrote " << ctx.out("policy.json") << '\n';
  return 0;
}

int cmd_sets(const Context& ctx) {
  const Context::Offline off = ctx.offline(ctx.cfg.horizon_n, ctx.cfg.gain_policy);
  const DisturbanceSet d = build_additive_set(ctx.model, ctx.cfg.mode);
  const TightenedSets ts = tighten(off.policies, d, additive_w_set(ctx.model), ctx.model.u_set, ctx.model.x_set,
                                   ctx.cfg.horizon_n, ctx.cfg.mode);
  Json pols = Json::array();
  for (const DeadbeatPolicy& p : off.policies) pols.push_back(io::to_json(p));
  Json meta = ctx.meta("sets");
  meta["policy_hash"] = io::content_hash(pols);
  meta["model_hash"] = io::content_hash(io::to_json(ctx.model));
  Json out = io::to_json(ts);
  out["meta"] = meta;
  out["disturbance_set"] = io::to_json(d.set_v);
  io::write_json_file(ctx.out("tightened_sets.json"), out);

  std::cout << "step  input offsets / state offsets\n";
  for (int j = 0; j < ts.horizon_n(); ++j) {
    std::cout << std::setw(4) << j << "  u: " << ts.input_set(j).offsets().transpose() << '\n';
    std::cout << std::setw(4) << j + 1 << "  x: " << ts.state_set(j + 1).offsets().transpose() << '\n';
  }
  std::cout << "wrote " << ctx.out("tightened_sets.json") << '\n';
  return 0;
}

int cmd_simulate(const Context& ctx) {
  if (ctx.cfg.x0.size() != ctx.model.n()) throw Error(ErrorKind::config, "sim.x0 must have n entries");
  LpvModel model = ctx.model;
  const Controller ctrl(model, ctx.controller_config());
  SimConfig sc = ctx.cfg.sim;
  sc.seed = ctx.cfg.seed;
  if (ctx.dump_qp) {
    const Controller::Step st = ctrl.config.mode == Mode::robust
                                    ? *ctrl.robust_step
                                    : ctrl.build_step(make_schedule(model, ctx.nominal_path(ctrl.schedule_points()),
                                                                    ctrl.config.horizon_n));
    ctx.maybe_dump(st.ftocp->qp(ctx.cfg.x0));
  }
  const SimTrace tr = run_closed_loop(ctrl, ctx.cfg.x0, sc);
  {
    std::ofstream os(ctx.out("trace.csv"));
    os << ctx.csv_header();
    write_trace_csv(os, tr);
  }
  Json out = io::to_json(tr);
  out["meta"] = ctx.meta("simulate");
  if (sc.monitors.value_decrease && tr.values.size() >= 2) {
    const ValueReport vr = value_decrease_check(tr, 0.0);
    out["value_report"] = {{"checked_zero", vr.checked_zero},
                           {"violations_zero", vr.violations_zero},
                           {"worst_zero_slack", vr.worst_zero_slack},
                           {"checked_disturbed", vr.checked_disturbed},
                           {"sigma_observed", vr.sigma_observed}};
  }
  io::write_json_file(ctx.out("trace.json"), out);

  std::cout << "steps " << tr.steps() << ", infeasible " << tr.infeasible_steps << ", shift candidate "
            << (tr.all_shift_ok() ? "ok" : "FAILED") << '\n';
  if (!tr.states.empty()) std::cout << "final state " << tr.states.back().transpose() << '\n';
  std::cout << "wrote " << ctx.out("trace.csv") << " and " << ctx.out("trace.json") << '\n';
  if (tr.initial_infeasible) {
    std::cerr << "initial state is outside the feasible set\n";
    return 2;
  }
  if (ctx.strict && (tr.recursive_feasibility_violation || !tr.all_shift_ok())) return 2;
  return 0;
}

int cmd_roa(const Context& ctx) {
  const GridSpec grid = GridSpec::over(ctx.model.x_set, ctx.cfg.roa.points_per_axis);
  const SweepOptions so{ctx.cfg.roa.method, ctx.cfg.roa.threads};
  Json summary = {{"meta", ctx.meta("roa")}, {"results", Json::object()}};
  std::cout << "   N   area(cells)    area(hull)\n";
  bool dumped = false;
  for (int nh : ctx.cfg.roa.horizons) {
    const Context::Offline off = ctx.offline(nh, ctx.cfg.gain_policy);
    const CondensedFtocp f(roa_spec(ctx.model, ctx.cfg.mode, off.schedule, off.policies, ctx.cost(), nh, ctx.cfg.terminal));
    if (!dumped) {
      ctx.maybe_dump(f.qp(ctx.cfg.x0.size() == ctx.model.n() ? ctx.cfg.x0 : Vec(Vec::Zero(ctx.model.n()))));
      dumped = true;
    }
    const RoaResult r = sweep(f, grid, so);
    const std::string tag = "roa_N" + std::to_string(nh);
    {
      std::ofstream os(ctx.out(tag + ".csv"));
      os << ctx.csv_header();
      write_mask_csv(os, r);
    }
    {
      std::ofstream os(ctx.out(tag + ".points"));
      os << ctx.csv_header();
      write_point_file(os, r);
    }
    summary["results"][std::to_string(nh)] = io::to_json(r);
    std::cout << std::setw(4) << nh << std::setw(14) << std::fixed << std::setprecision(2) << r.area << std::setw(14)
              << area(r, AreaMethod::hull) << std::defaultfloat << '\n';
  }
  io::write_json_file(ctx.out("roa.json"), summary);
  std::cout << "wrote " << ctx.out("roa.json") << '\n';
  return 0;
}

int cmd_experiment(const Context& ctx) {
  RincOptions opt;
  opt.gain_policy = ctx.cfg.experiment.gain_policy;
  opt.grid = GridSpec::over(ctx.model.x_set, ctx.cfg.roa.points_per_axis);
  opt.sweep = {ctx.cfg.roa.method, ctx.cfg.roa.threads};
  const int mm = ctx.horizon_m();
  Json all = {{"meta", ctx.meta("experiment")}, {"tables", Json::array()}};
  all["meta"]["gain_policy"] = to_string(ctx.cfg.experiment.gain_policy);
  for (double delta : ctx.cfg.experiment.deltas) {
    const RincTable t = rinc_experiment(ctx.model, ctx.cost(), mm, ctx.cfg.experiment.horizons, delta,
                                        ctx.cfg.experiment.realizations, ctx.cfg.seed, opt);
    all["tables"].push_back(io::to_json(t));
    std::cout << "delta_max = " << delta << " (" << t.realizations << " realizations, " << t.resampled
              << " resampled)\n   N  r_avmin  r_avmax   r_inc(N->N+1)\n";
    for (const auto& [nh, row] : t.per_n) {
      std::cout << std::setw(4) << nh << std::fixed << std::setprecision(3) << std::setw(9) << row.r_avmin
                << std::setw(9) << row.r_avmax;
      if (auto it = t.r_inc.find(nh); it != t.r_inc.end())
        std::cout << std::setprecision(1) << std::setw(10) << it->second.mean << " +- " << it->second.stddev;
      std::cout << std::defaultfloat << '\n';
    }
  }
  io::write_json_file(ctx.out("rinc.json"), all);
  std::cout << "wrote " << ctx.out("rinc.json") << '\n';
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Deadbeat robust MPC: gain synthesis, constraint tightening, simulation and RoA studies"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> dump_qp;
  bool strict = false;
  app.add_option("--config", config_path, "Run configuration (JSON)")->required();
  app.add_option("--output", output_dir, "Output directory (overrides the config)");
  app.add_option("--seed", seed, "Random seed (overrides the config)");
  app.add_flag("--strict", strict, "Nonzero exit when a runtime monitor fails");
  app.add_option("--dump-qp", dump_qp, "Write the first condensed QP as plain text");
  auto* gains = app.add_subcommand("gains", "Synthesize deadbeat gains");
  auto* sets = app.add_subcommand("sets", "Compute tightened constraint sets");
  auto* simulate = app.add_subcommand("simulate", "Closed-loop simulation with monitors");
  auto* roa = app.add_subcommand("roa", "Feasible-set sweeps over the horizon list");
  auto* experiment = app.add_subcommand("experiment", "RoA statistics over random nominal parameter paths");
  app.fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  try {
    RunConfig cfg = load_run_config(config_path);
    if (output_dir) cfg.output_dir = *output_dir;
    if (seed) cfg.seed = *seed;
    LpvModel model = io::model_from_json(io::read_json_file(cfg.model_path));
    if (cfg.delta_max) model = model.with_theta_delta(*cfg.delta_max);
    Json hashed = cfg.raw;
    hashed["seed"] = cfg.seed;
    const std::string hash = io::content_hash(hashed);
    const Context ctx{std::move(cfg), std::move(model), hash, dump_qp, strict};
    fs::create_directories(ctx.cfg.output_dir);
    std::cout << "config " << ctx.config_hash << ", seed " << ctx.cfg.seed << '\n';

    if (*gains) return cmd_gains(ctx);
    if (*sets) return cmd_sets(ctx);
    if (*simulate) return cmd_simulate(ctx);
    if (*roa) return cmd_roa(ctx);
    if (*experiment) return cmd_experiment(ctx);
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 4;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace drmpc::cli
