// Acceptance run for the benchmark: one PASS/FAIL line per criterion.
// Usage: drmpc_acceptance [criterion numbers...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "drmpc/deadbeat.hpp"
#include "drmpc/roa.hpp"
#include "drmpc/simulator.hpp"
#include "qp_oracle.hpp"
#include "support.hpp"

using namespace drmpc;
using drmpc::fx::vec2;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

StageCost unit_cost() { return {Mat::Identity(2, 2), Mat::Identity(1, 1)}; }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Outward unit normals and offsets of a counter-clockwise 2-D polygon.
std::pair<Mat, Vec> polygon_h(const PolytopeV& p) {
  const std::vector<Vec> v = hull_2d(p.vertices());
  const int k = static_cast<int>(v.size());
  Mat n(k, 2);
  Vec b(k);
  for (int i = 0; i < k; ++i) {
    const Vec e = v[(i + 1) % k] - v[i];
    const Vec nn = vec2(e(1), -e(0)).normalized();
    n.row(i) = nn.transpose();
    b(i) = nn.dot(v[i]);
  }
  return {n, b};
}

Outcome c1_deadbeat() {
  const LpvModel m = fx::benchmark();
  const PolytopeV d = build_additive_set(m, Mode::robust).set_v;
  std::mt19937_64 rng(1);
  double worst = 0, worst_res = 0;
  for (int mm : {3, 2}) {
    const DeadbeatPolicy p = solve_gains_lti(m.a_bar, m.b_bar, mm);
    worst_res = std::max(worst_res, p.residual);
    std::vector<Vec> d0s = d.vertices();
    for (int i = 0; i < 200; ++i) d0s.push_back(fx::random_convex_point(rng, d));
    for (const Vec& d0 : d0s) {
      // Independent forward simulation x_{j+1} = A x_j + B K_j d0.
      Vec x = d0;
      for (int j = 0; j < mm; ++j) x = m.a_bar * x + m.b_bar * (p.gains[j] * d0);
      worst = std::max(worst, x.norm());
      worst = std::max(worst, verify_deadbeat(p, MatList(mm, m.a_bar), MatList(mm, m.b_bar), d0));
    }
  }
  return {worst <= 1e-9 && worst_res <= 1e-9,
          "max ||x_M|| = " + fmt("%.2e", worst) + ", max residual = " + fmt("%.2e", worst_res) + " (M = 3 and 2)"};
}

Outcome c2_disturbance_set() {
  const PolytopeV d = build_additive_set(fx::benchmark(), Mode::robust).set_v;
  const PolytopeH ref = fx::reference_d();
  const Vec norms = ref.normals().rowwise().norm();
  double a_in_b = -1e300;
  for (const Vec& v : d.vertices())
    a_in_b = std::max(a_in_b, ((ref.normals() * v - ref.offsets()).cwiseQuotient(norms)).maxCoeff());
  const auto [n, b] = polygon_h(d);
  double b_in_a = -1e300;
  for (const Vec& v : vertices_of(ref).vertices()) b_in_a = std::max(b_in_a, (n * v - b).maxCoeff());
  std::ostringstream os;
  os << d.size() << " vertices; computed-in-reference gap " << fmt("%.4f", a_in_b) << ", reference-in-computed gap "
     << fmt("%.4f", b_in_a) << " (slack 1e-3)";
  return {d.size() == 4 && a_in_b <= 1e-3 && b_in_a <= 1e-3, os.str()};
}

ControllerConfig controller(Mode mode, int n_h) {
  ControllerConfig c;
  c.mode = mode;
  c.horizon_n = n_h;
  c.horizon_m = 3;
  c.cost = unit_cost();
  return c;
}

Outcome c3_recursive_feasibility() {
  std::mt19937_64 rng(3);
  int runs = 0, infeasible = 0, shift_fail = 0, start_fail = 0;
  {
    const Controller ctrl(fx::benchmark(), controller(Mode::robust, 6));
    for (int r = 0; r < 200; ++r) {
      Vec x0;
      do x0 = fx::random_vec(rng, 2, -60, 60);
      while (!is_feasible(*ctrl.robust_step->ftocp, x0));
      SimConfig s;
      s.steps = 500;
      s.seed = 1000 + r;
      s.disturbance_mode = DisturbanceMode::vertices;
      const SimTrace t = run_closed_loop(ctrl, x0, s);
      ++runs;
      start_fail += t.initial_infeasible;
      infeasible += t.infeasible_steps + (t.steps() != 500);
      for (const MonitorReport& m : t.monitors) shift_fail += !m.shift_ok;
    }
  }
  const int robust_runs = runs;
  for (double delta : {0.1, 0.3, 0.5}) {
    const Controller ctrl(fx::benchmark(delta), controller(Mode::lpv, 6));
    for (int r = 0; r < 20; ++r) {
      SimConfig s;
      s.steps = 200;
      s.seed = 5000 + r + static_cast<int>(delta * 1000);
      s.delta_max = delta;
      s.disturbance_mode = DisturbanceMode::vertices;
      SimTrace t;
      for (int attempt = 0; attempt < 100; ++attempt) {
        t = run_closed_loop(ctrl, fx::random_vec(rng, 2, -40, 40), s);
        if (!t.initial_infeasible) break;
      }
      ++runs;
      start_fail += t.initial_infeasible;
      infeasible += t.infeasible_steps + (!t.initial_infeasible && t.steps() != 200);
      for (const MonitorReport& m : t.monitors) shift_fail += !m.shift_ok;
    }
  }
  std::ostringstream os;
  os << robust_runs << " robust runs x 500 steps, " << runs - robust_runs << " lpv runs x 200 steps; infeasible "
     << infeasible << ", shift-candidate failures " << shift_fail << ", infeasible starts " << start_fail;
  return {infeasible == 0 && shift_fail == 0 && start_fail == 0, os.str()};
}

Outcome c4_iss() {
  const LpvModel m = fx::benchmark();
  const Controller ctrl(m, controller(Mode::robust, 6));
  std::mt19937_64 rng(4);
  int converged = 0, violations = 0, starts = 0;
  double worst_slack = -1e300;
  std::vector<Vec> x0s;
  while (x0s.size() < 20) {
    const Vec x0 = fx::random_vec(rng, 2, -60, 60);
    if (is_feasible(*ctrl.robust_step->ftocp, x0)) x0s.push_back(x0);
  }
  for (const Vec& x0 : x0s) {
    SimConfig s;
    s.steps = 60;
    s.disturbance_mode = DisturbanceMode::zero;
    const SimTrace t = run_closed_loop(ctrl, x0, s);
    ++starts;
    const ValueReport v = value_decrease_check(t, 0.0);
    violations += v.violations_zero;
    worst_slack = std::max(worst_slack, v.worst_zero_slack);
    converged += !t.states.empty() && t.states.back().norm() <= 1e-6;
  }
  // Disturbed runs: calibrate sigma on the first half, validate on the second.
  double sigma_cal = 0, sigma_val = 0, max_state = 0;
  bool bounded = true, all_feasible = true;
  for (int r = 0; r < 20; ++r) {
    SimConfig s;
    s.steps = 200;
    s.seed = 40 + r;
    s.disturbance_mode = DisturbanceMode::vertices;
    const SimTrace t = run_closed_loop(ctrl, x0s[r], s);
    all_feasible = all_feasible && !t.initial_infeasible && t.infeasible_steps == 0;
    for (const Vec& x : t.states) {
      max_state = std::max(max_state, x.norm());
      bounded = bounded && contains(m.x_set, x, 1e-8);
    }
    const ValueReport v = value_decrease_check(t, 0.0);
    (r < 10 ? sigma_cal : sigma_val) = std::max(r < 10 ? sigma_cal : sigma_val, v.sigma_observed);
  }
  std::ostringstream os;
  os << converged << "/" << starts << " disturbance-free runs reach ||x|| <= 1e-6, value-decrease violations "
     << violations << " (worst slack " << fmt("%.1e", worst_slack) << "); disturbed: max ||x|| "
     << fmt("%.2f", max_state) << ", sigma calibrated " << fmt("%.3f", sigma_cal) << ", validation "
     << fmt("%.3f", sigma_val);
  return {converged == starts && violations == 0 && bounded && all_feasible && std::isfinite(sigma_cal) &&
              std::isfinite(sigma_val),
          os.str()};
}

Outcome c5_roa_structure() {
  const LpvModel m = fx::benchmark();
  const DeadbeatPolicy p = solve_gains_lti(m.a_bar, m.b_bar, 3);
  const PolytopeH xd = pontryagin_diff(m.x_set, build_additive_set(m, Mode::robust).set_v);
  const GridSpec g = GridSpec::over(m.x_set, 121);
  std::map<int, double> areas;
  bool inside = true;
  for (int n_h : {4, 6, 8, 10, 12, 14}) {
    const CondensedFtocp f(roa_spec(m, Mode::robust, constant_schedule(m, Vec::Zero(2), n_h + 1), {p}, unit_cost(), n_h));
    const RoaResult r = sweep(f, g);
    areas[n_h] = r.area;
    for (const Vec& x : r.feasible_points()) inside = inside && contains(xd, x);
  }
  bool monotone = true;
  double prev = 0;
  std::ostringstream os;
  os << "areas";
  for (const auto& [n_h, a] : areas) {
    monotone = monotone && a >= prev;
    prev = a;
    os << " N" << n_h << "=" << fmt("%.1f", a);
  }
  const double growth = 100.0 * (areas[14] - areas[12]) / areas[12];
  os << "; growth 12->14 " << fmt("%.2f", growth) << "% (limit 1%); monotone " << (monotone ? "yes" : "no")
     << "; inside X-D " << (inside ? "yes" : "no");
  return {monotone && inside && growth < 1.0, os.str()};
}

RincTable rinc(double delta) {
  RincOptions opt;
  opt.gain_policy = GainPolicy::shared;
  return rinc_experiment(fx::benchmark(delta), unit_cost(), 3, {3, 4, 5, 6, 7, 8, 9, 10}, delta, 20, 606, opt);
}

Outcome c6_rinc_trends(std::vector<std::string>& info) {
  std::ostringstream os;
  bool ok = true;
  for (double delta : {0.1, 0.5}) {
    const RincTable t = rinc(delta);
    bool mono = true;
    double prev = 1e300;
    for (const auto& [n_h, s] : t.r_inc) {
      mono = mono && s.mean <= prev;
      prev = s.mean;
    }
    bool ratios = true;
    for (int n_h = 4; n_h <= 9; ++n_h) {
      const RincRow& r = t.per_n.at(n_h);
      ratios = ratios && r.r_avmin >= 1.0 && r.r_avmin <= 1.3 && r.r_avmax >= 0.75 && r.r_avmax <= 1.0;
    }
    os << "delta " << delta << ": r_inc";
    for (const auto& [n_h, s] : t.r_inc) os << " " << n_h << "->" << n_h + 1 << "=" << fmt("%.1f", s.mean);
    os << "; monotone " << (mono ? "yes" : "no") << ", ratios in range " << (ratios ? "yes" : "no");
    info.push_back("delta " + fmt("%.1f", delta) + ": r_inc(3->4) = " + fmt("%.1f", t.r_inc.at(3).mean) + " +- " +
                   fmt("%.1f", t.r_inc.at(3).stddev) + ", r_inc(4->5) = " + fmt("%.1f", t.r_inc.at(4).mean) + " +- " +
                   fmt("%.1f", t.r_inc.at(4).stddev) + ", resampled paths " + std::to_string(t.resampled));
    std::string rows = "delta " + fmt("%.1f", delta) + ": r_avmin/r_avmax";
    for (int n_h = 4; n_h <= 9; ++n_h) {
      const RincRow& r = t.per_n.at(n_h);
      rows += " N" + std::to_string(n_h) + "=" + fmt("%.3f", r.r_avmin) + "/" + fmt("%.3f", r.r_avmax);
    }
    info.push_back(rows);
    ok = ok && mono && ratios;
    if (delta == 0.1) {
      const double r45 = t.r_inc.at(4).mean, r9 = t.r_inc.at(9).mean;
      os << ", r_inc(4->5) in [64,94] " << (r45 >= 64 && r45 <= 94 ? "yes" : "no") << ", r_inc(9->10) < 0.5 "
         << (r9 < 0.5 ? "yes" : "no") << "; ";
      ok = ok && r45 >= 64 && r45 <= 94 && r9 < 0.5;
    }
  }
  return {ok, os.str()};
}

Outcome c7_lpv_advantage() {
  const LpvModel m = fx::benchmark(0.1);
  const GridSpec g = GridSpec::over(m.x_set, 121);
  const DeadbeatPolicy p = solve_gains_lti(m.a_bar, m.b_bar, 3);
  const PolytopeH xd = pontryagin_diff(m.x_set, build_additive_set(m, Mode::robust).set_v);
  const double robust =
      sweep(CondensedFtocp(roa_spec(m, Mode::robust, constant_schedule(m, Vec::Zero(2), 11), {p}, unit_cost(), 10)), g)
          .area;
  bool ok = true;
  std::ostringstream os;
  os << "robust " << fmt("%.1f", robust) << "; lpv";
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto path = sample_parameter_path(m.theta_set, 0.1, 11, seed);
    const NominalSchedule s = make_schedule(m, path, 10);
    const auto pols = lpv_entry_policies(m, s, 3, 10, GainPolicy::shared);
    const RoaResult r = sweep(CondensedFtocp(roa_spec(m, Mode::lpv, s, pols, unit_cost(), 10)), g);
    int outside = 0;
    for (const Vec& x : r.feasible_points()) outside += !contains(xd, x);
    os << " " << fmt("%.1f", r.area) << " (" << outside << " pts outside X-D)";
    ok = ok && r.area > robust && outside > 0;
  }
  return {ok, os.str()};
}

Outcome c8_qp_oracle() {
  std::mt19937_64 rng(8);
  int mismatch_status = 0, mismatch_value = 0, feasible = 0;
  double worst = 0;
  for (int t = 0; t < 500; ++t) {
    const solver::QpProblem qp = fx::random_qp(rng);
    const fx::OracleResult o = fx::kkt_oracle(qp);
    const solver::QpSolution s = solver::solve_qp(qp);
    if ((s.status == solver::QpStatus::optimal) != o.feasible) {
      ++mismatch_status;
      continue;
    }
    if (!o.feasible) continue;
    ++feasible;
    const double err = std::abs(s.value - o.value);
    worst = std::max(worst, err);
    mismatch_value += err > 1e-6;
  }
  std::ostringstream os;
  os << "500 QPs (" << feasible << " feasible): status mismatches " << mismatch_status << ", value mismatches "
     << mismatch_value << ", worst |dV| " << fmt("%.1e", worst);
  return {mismatch_status == 0 && mismatch_value == 0, os.str()};
}

Outcome c9_set_algebra() {
  std::mt19937_64 rng(9);
  int fail_erosion = 0, fail_support = 0, fail_box = 0, fail_image = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + t % 2;
    const PolytopeH s = fx::random_h(rng, n, 3);
    const PolytopeV tv(fx::random_cloud(rng, n, 2 + t % 5, 0.4));
    const PolytopeH d = pontryagin_diff(s, tv);
    if (!is_empty(d)) {
      const PolytopeV dv = vertices_of(d);
      std::vector<Vec> pts = dv.vertices();
      for (int k = 0; k < 3; ++k) pts.push_back(fx::random_convex_point(rng, dv));
      bool ok = true;
      for (const Vec& x : pts)
        for (const Vec& v : tv.vertices()) ok = ok && contains(s, x + v, 1e-8);
      fail_erosion += !ok;
    }
  }
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + t % 3;
    const PolytopeV p(fx::random_cloud(rng, n, 1 + t % 7, 2.0)), q(fx::random_cloud(rng, n, 1 + t % 5, 2.0));
    const Vec a = fx::random_vec(rng, n, -1, 1);
    fail_support += std::abs(support(minkowski_sum(p, q), a) - support(p, a) - support(q, a)) > 1e-10;
  }
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + t % 3;
    const Vec lo = fx::random_vec(rng, n, -5, -1), hi = fx::random_vec(rng, n, 1, 5);
    const Vec tlo = fx::random_vec(rng, n, -0.9, 0), thi = fx::random_vec(rng, n, 0, 0.9);
    const PolytopeV tv = vertices_of(PolytopeH::box(tlo, thi));
    const PolytopeH d = pontryagin_diff(PolytopeH::box(lo, hi), tv);
    const PolytopeV sum = minkowski_sum(vertices_of(PolytopeH::box(lo, hi)), tv);
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      ok = ok && d.offsets()(i) == hi(i) - thi(i) && d.offsets()(n + i) == -lo(i) + tlo(i);
      ok = ok && support(sum, Vec(Vec::Unit(n, i))) == hi(i) + thi(i) &&
           support(sum, Vec(-Vec::Unit(n, i))) == -(lo(i) + tlo(i));
    }
    fail_box += !ok;
  }
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + t % 3, r = 1 + (t / 3) % 3;
    const PolytopeV p(fx::random_cloud(rng, n, 1 + t % 6, 2.0));
    const Mat mm = fx::random_mat(rng, r, n);
    const Vec a = fx::random_vec(rng, r, -1, 1);
    fail_image += std::abs(support(linear_image(mm, p), a) - support(p, Vec(mm.transpose() * a))) > 1e-10;
  }
  std::ostringstream os;
  os << "1000 cases each; failures: erosion/dilation " << fail_erosion << ", support additivity " << fail_support
     << ", box closed forms " << fail_box << ", image support " << fail_image;
  return {fail_erosion + fail_support + fail_box + fail_image == 0, os.str()};
}

Outcome c10_dimensions() {
  const LpvModel m = fx::benchmark();
  const DeadbeatPolicy p = solve_gains_lti(m.a_bar, m.b_bar, 3);
  std::ostringstream os;
  bool ok = true;
  for (int n_h : {6, 14}) {
    FtocpSpec s{constant_schedule(m, Vec::Zero(2), n_h + 1),
                tighten(p, build_additive_set(m, Mode::robust), additive_w_set(m), m.u_set, m.x_set, n_h, Mode::robust),
                unit_cost(), n_h, Terminal::origin(), std::nullopt};
    const CondensedFtocp f(s);
    os << "N=" << n_h << ": " << f.num_variables() << " variables, " << f.num_inequalities() << " inequalities, "
       << f.num_equalities() << " equalities; ";
    ok = ok && f.num_variables() == n_h;
  }
  os << "reference N=6 counts are 32 inequalities / 16 equalities (convention differs, see README)";
  return {ok, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));
  std::vector<std::string> info;
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "deadbeat identity", 1.0, c1_deadbeat},
      {2, "disturbance-set reproduction", 1.0, c2_disturbance_set},
      {3, "recursive feasibility", 1800.0, c3_recursive_feasibility},
      {4, "ISS behavior", 600.0, c4_iss},
      {5, "RoA structure", 600.0, c5_roa_structure},
      {6, "r_inc trends", 1800.0, [&] { return c6_rinc_trends(info); }},
      {7, "LPV advantage", 600.0, c7_lpv_advantage},
      {8, "QP solver oracle", 600.0, c8_qp_oracle},
      {9, "set-algebra property suite", 600.0, c9_set_algebra},
      {10, "problem dimensions", 60.0, c10_dimensions},
  };
  int failed = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.limit_s;
    failed += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name << "): " << o.detail << " ["
              << fmt("%.2f", secs) << " s, limit " << fmt("%.0f", c.limit_s) << " s]" << std::endl;
  }
  for (const std::string& s : info) std::cout << "INFO  " << s << '\n';
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
  return failed == 0 ? 0 : 1;
}
