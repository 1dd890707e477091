#include "drmpc/roa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "drmpc/kernels.hpp"
#include "drmpc/simulator.hpp"

namespace drmpc {

GridSpec GridSpec::over(const PolytopeH& box_of, int points_per_axis) {
  if (points_per_axis < 2) throw Error(ErrorKind::config, "grid needs at least 2 points per axis");
  const int n = box_of.dim();
  GridSpec g;
  g.lower.resize(n);
  g.upper.resize(n);
  for (int i = 0; i < n; ++i) {
    g.upper(i) = support(box_of, Vec(Vec::Unit(n, i)));
    g.lower(i) = -support(box_of, Vec(-Vec::Unit(n, i)));
  }
  g.resolution.assign(n, points_per_axis);
  return g;
}

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int r : resolution) s *= static_cast<std::size_t>(r);
  return s;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= spacing(i);
  return v;
}

Vec GridSpec::point(std::size_t index) const {
  Vec x(dim());
  for (int i = 0; i < dim(); ++i) {
    const auto r = static_cast<std::size_t>(resolution[i]);
    x(i) = lower(i) + static_cast<double>(index % r) * spacing(i);
    index /= r;
  }
  return x;
}

std::size_t RoaResult::feasible_count() const {
  return static_cast<std::size_t>(std::count(feasible_mask.begin(), feasible_mask.end(), 1));
}

std::vector<Vec> RoaResult::feasible_points() const {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < feasible_mask.size(); ++i)
    if (feasible_mask[i]) out.push_back(grid.point(i));
  return out;
}

namespace {

void validate_grid(const GridSpec& g, int n) {
  require_dims(g.dim() == n && static_cast<int>(g.resolution.size()) == n, "grid dimension mismatch");
  for (int i = 0; i < n; ++i) {
    if (g.resolution[i] < 2) throw Error(ErrorKind::config, "grid needs at least 2 points per axis");
    if (!(g.upper(i) > g.lower(i))) throw Error(ErrorKind::config, "grid bounds must satisfy lower < upper");
  }
}

// Grid points violating the initial set, evaluated by the batch kernel.
std::vector<char> prefilter(const CondensedFtocp& f, const GridSpec& g) {
  const std::size_t total = g.size();
  std::vector<char> ok(total, 1);
  if (!f.initial_set()) return ok;
  Mat pts(static_cast<Eigen::Index>(total), g.dim());
  for (std::size_t i = 0; i < total; ++i) pts.row(static_cast<Eigen::Index>(i)) = g.point(i).transpose();
  const Vec viol = max_violation(*f.initial_set(), pts);
  for (std::size_t i = 0; i < total; ++i) ok[i] = viol(static_cast<Eigen::Index>(i)) <= kMembershipTol;
  return ok;
}

template <typename Job>
void parallel_rows(int rows, int threads, Job job) {
  threads = std::max(1, std::min(threads, rows));
  if (threads == 1) {
    for (int r = 0; r < rows; ++r) job(r);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int r = t; r < rows; r += threads) job(r);
    });
  for (std::thread& th : pool) th.join();
}

void pointwise(const CondensedFtocp& f, const GridSpec& g, const std::vector<char>& pre, std::vector<char>& mask,
               int threads) {
  const int row_len = g.resolution[0];
  const int rows = static_cast<int>(g.size() / static_cast<std::size_t>(row_len));
  parallel_rows(rows, threads, [&](int r) {
    Vec hint;
    bool have_hint = false;
    for (int c = 0; c < row_len; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * row_len + c;
      if (!pre[idx]) continue;
      Vec point;
      const bool ok = is_feasible(f, g.point(idx), have_hint ? &hint : nullptr, &point);
      mask[idx] = ok;
      if (ok) {
        hint = std::move(point);
        have_hint = true;
      }
    }
  });
}

// Feasible set is convex, so each grid row meets it in an interval found by two LPs.
void row_interval(const CondensedFtocp& f, const GridSpec& g, const std::vector<char>& pre, std::vector<char>& mask,
                  int threads) {
  const int row_len = g.resolution[0];
  const int rows = g.resolution[1];
  const int d = f.num_variables();
  const double lo = g.lower(0), hi = g.upper(0);
  const double tol = kMembershipTol * std::max({1.0, std::abs(lo), std::abs(hi)});
  parallel_rows(rows, threads, [&](int r) {
    Vec base = Vec::Zero(2);
    base(1) = g.lower(1) + r * g.spacing(1);
    solver::LinearSystem sys = f.line_system(base, Vec::Unit(2, 0));
    const Eigen::Index k = sys.ineq.rows();
    sys.ineq.conservativeResize(k + 2, d + 1);
    sys.ineq_rhs.conservativeResize(k + 2);
    sys.ineq.bottomRows(2).setZero();
    sys.ineq(k, d) = 1.0;
    sys.ineq_rhs(k) = hi;
    sys.ineq(k + 1, d) = -1.0;
    sys.ineq_rhs(k + 1) = -lo;
    Vec c = Vec::Zero(d + 1);
    c(d) = 1.0;
    const solver::LpResult lmin = solver::minimize(c, sys);
    if (lmin.status != solver::LpStatus::optimal) return;
    const solver::LpResult lmax = solver::minimize(-c, sys, {}, &lmin.point);
    if (lmax.status != solver::LpStatus::optimal) return;
    const double smin = lmin.point(d), smax = lmax.point(d);
    for (int col = 0; col < row_len; ++col) {
      const std::size_t idx = static_cast<std::size_t>(r) * row_len + col;
      const double s = lo + col * g.spacing(0);
      mask[idx] = pre[idx] && s >= smin - tol && s <= smax + tol;
    }
  });
}

}  // namespace

RoaResult sweep(const CondensedFtocp& ftocp, const GridSpec& grid, const SweepOptions& opt) {
  validate_grid(grid, ftocp.state_dim());
  RoaResult res;
  res.grid = grid;
  res.feasible_mask.assign(grid.size(), 0);
  const std::vector<char> pre = prefilter(ftocp, grid);
  if (opt.method == SweepMethod::row_interval && grid.dim() == 2)
    row_interval(ftocp, grid, pre, res.feasible_mask, opt.threads);
  else
    pointwise(ftocp, grid, pre, res.feasible_mask, opt.threads);
  res.area = static_cast<double>(res.feasible_count()) * grid.cell_volume();
  if (grid.dim() == 2 && res.feasible_count() > 0) res.hull_vertices = convex_hull(res.feasible_points());
  return res;
}

double area(const RoaResult& result, AreaMethod method) {
  require_dims(result.grid.dim() == 2, "area needs a 2-D grid");
  if (method == AreaMethod::cells) return static_cast<double>(result.feasible_count()) * result.grid.cell_volume();
  if (!result.hull_vertices) return 0.0;
  return area_2d(*result.hull_vertices);
}

FtocpSpec roa_spec(const LpvModel& model, Mode mode, const NominalSchedule& schedule,
                   const std::vector<DeadbeatPolicy>& policies, const StageCost& cost, int horizon_n,
                   const Terminal& terminal) {
  const DisturbanceSet d_set = build_additive_set(model, mode);
  const DisturbanceSet w_set = additive_w_set(model);
  TightenedSets ts = tighten(policies, d_set, w_set, model.u_set, model.x_set, horizon_n, mode);
  const PolytopeV& first = mode == Mode::robust ? d_set.set_v : w_set.set_v;
  return FtocpSpec{schedule, std::move(ts), cost, horizon_n, terminal, pontryagin_diff(model.x_set, first)};
}

RincTable rinc_experiment(const LpvModel& model_in, const StageCost& cost, int horizon_m, const std::vector<int>& n_list,
                          double delta_max, int realizations, std::uint64_t seed, const RincOptions& opt) {
  if (realizations < 2) throw Error(ErrorKind::config, "at least 2 realizations are needed");
  if (n_list.empty() || !std::is_sorted(n_list.begin(), n_list.end()))
    throw Error(ErrorKind::config, "horizon list must be nonempty and ascending");
  const LpvModel model = model_in.with_theta_delta(delta_max);
  model.validate();
  const GridSpec grid = opt.grid.lower.size() > 0 ? opt.grid : GridSpec::over(model.x_set, 121);
  const int n_max = n_list.back();
  const int len = schedule_points_needed(opt.gain_policy, horizon_m, n_max);

  RincTable t;
  t.delta_max = delta_max;
  t.realizations = realizations;
  std::mt19937_64 seeds(seed);
  while (static_cast<int>(t.areas.size()) < realizations) {
    const std::vector<Vec> path = sample_parameter_path(model.theta_set, delta_max, len, seeds());
    std::map<int, double> areas;
    try {
      for (int nh : n_list) {
        const NominalSchedule sch = make_schedule(model, path, nh);
        const auto pols = lpv_entry_policies(model, sch, horizon_m, nh, opt.gain_policy);
        const CondensedFtocp f(roa_spec(model, Mode::lpv, sch, pols, cost, nh));
        areas[nh] = sweep(f, grid, opt.sweep).area;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::schedule_invalid) throw;
      ++t.resampled;
      if (t.resampled > 100 * realizations) throw;
      continue;
    }
    t.areas.push_back(std::move(areas));
  }

  const double r = static_cast<double>(realizations);
  for (int nh : n_list) {
    RincRow row;
    row.min_area = std::numeric_limits<double>::infinity();
    for (const auto& a : t.areas) {
      row.mean_area += a.at(nh) / r;
      row.min_area = std::min(row.min_area, a.at(nh));
      row.max_area = std::max(row.max_area, a.at(nh));
    }
    row.r_avmin = row.min_area > 0 ? row.mean_area / row.min_area : 0.0;
    row.r_avmax = row.max_area > 0 ? row.mean_area / row.max_area : 0.0;
    t.per_n[nh] = row;
  }
  for (std::size_t i = 0; i + 1 < n_list.size(); ++i) {
    const int nh = n_list[i];
    if (n_list[i + 1] != nh + 1) continue;
    std::vector<double> inc;
    for (const auto& a : t.areas) {
      const double base = a.at(nh);
      inc.push_back(base > 0 ? 100.0 * (a.at(nh + 1) - base) / base : 0.0);
    }
    RincStat s;
    s.mean = std::accumulate(inc.begin(), inc.end(), 0.0) / r;
    double var = 0.0;
    for (double v : inc) var += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(var / (r - 1.0));
    t.r_inc[nh] = s;
  }
  return t;
}

void write_mask_csv(std::ostream& os, const RoaResult& r) {
  const auto old = os.precision(17);
  for (int i = 0; i < r.grid.dim(); ++i) os << 'x' << i << ',';
  os << "feasible\n";
  for (std::size_t i = 0; i < r.feasible_mask.size(); ++i) {
    const Vec x = r.grid.point(i);
    for (Eigen::Index j = 0; j < x.size(); ++j) os << x(j) << ',';
    os << int(r.feasible_mask[i]) << '\n';
  }
  os.precision(old);
}

void write_point_file(std::ostream& os, const RoaResult& r) {
  const auto old = os.precision(17);
  os << "# feasible grid points\n";
  for (const Vec& p : r.feasible_points()) {
    for (Eigen::Index j = 0; j < p.size(); ++j) os << (j ? " " : "") << p(j);
    os << '\n';
  }
  os << "\n# hull\n";
  if (r.hull_vertices) {
    const PolytopeV& h = *r.hull_vertices;
    for (std::size_t i = 0; i <= h.size(); ++i) {
      const Vec v = h.vertex(i % h.size());
      for (Eigen::Index j = 0; j < v.size(); ++j) os << (j ? " " : "") << v(j);
      os << '\n';
    }
  }
  os.precision(old);
}

}  // namespace drmpc
