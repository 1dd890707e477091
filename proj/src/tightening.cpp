#include "drmpc/tightening.hpp"

#include <string>

namespace drmpc {

const char* to_string(GainPolicy g) {
  switch (g) {
    case GainPolicy::shared: return "shared";
    case GainPolicy::per_entry: return "per_entry";
    case GainPolicy::frozen: return "frozen";
  }
  return "unknown";
}

GainPolicy gain_policy_from_string(const std::string& s) {
  if (s == "shared") return GainPolicy::shared;
  if (s == "per_entry") return GainPolicy::per_entry;
  if (s == "frozen") return GainPolicy::frozen;
  throw Error(ErrorKind::config, "unknown gain policy '" + s + "'");
}

namespace {

const DeadbeatPolicy& entry(const std::vector<DeadbeatPolicy>& pols, int e) {
  return pols[std::min<std::size_t>(static_cast<std::size_t>(e), pols.size() - 1)];
}

bool saturates(const std::vector<DeadbeatPolicy>& pols, Mode mode) {
  return pols.size() == 1 || (mode == Mode::lpv && pols.size() == 2);
}

}  // namespace

TightenedSets tighten(const DeadbeatPolicy& policy, const DisturbanceSet& d_set, const DisturbanceSet& w_set,
                      const PolytopeH& u_set, const PolytopeH& x_set, int horizon_n, Mode mode) {
  return tighten(std::vector<DeadbeatPolicy>{policy}, d_set, w_set, u_set, x_set, horizon_n, mode);
}

TightenedSets tighten(const std::vector<DeadbeatPolicy>& entry_policies, const DisturbanceSet& d_set,
                      const DisturbanceSet& w_set, const PolytopeH& u_set, const PolytopeH& x_set, int horizon_n,
                      Mode mode) {
  if (entry_policies.empty()) throw Error(ErrorKind::config, "no deadbeat policy given");
  const int mm = entry_policies.front().horizon_m;
  for (const DeadbeatPolicy& p : entry_policies) {
    if (p.horizon_m != mm) throw Error(ErrorKind::config, "entry policies disagree on M");
    if (p.residual > 1e-8) throw Error(ErrorKind::synthesis, "deadbeat residual above 1e-8");
    require_dims(p.n() == x_set.dim() && p.m() == u_set.dim(), "policy dimensions do not match the sets");
  }
  if (horizon_n < mm) throw Error(ErrorKind::config, "horizon N must be at least M");
  require_dims(d_set.set_v.dim() == x_set.dim() && w_set.set_v.dim() == x_set.dim(),
               "disturbance set dimension mismatch");

  const PolytopeV& first = mode == Mode::robust ? d_set.set_v : w_set.set_v;
  const PolytopeV& rest = d_set.set_v;
  auto set_of = [&](int e) -> const PolytopeV& { return e == 0 ? first : rest; };

  // Once every entry term has stabilized the sets stop changing.
  const bool sat = saturates(entry_policies, mode);
  const int sat_from = mode == Mode::robust ? mm : mm + 1;

  TightenedSets out;
  out.mode = mode;
  out.horizon_m = mm;
  const Mat& un = u_set.normals();
  const Mat& xn = x_set.normals();

  for (int j = 0; j < horizon_n; ++j) {
    if (sat && j > sat_from) {
      out.input_sets.push_back(out.input_sets.back());
      continue;
    }
    Vec off = u_set.offsets();
    for (int e = 0; e < j; ++e) {
      const int i = j - 1 - e;
      if (i >= mm) continue;
      off -= support(set_of(e), Mat(un * entry(entry_policies, e).gains[i]));
    }
    PolytopeH s = u_set.with_offsets(std::move(off));
    if (is_empty(s)) throw TighteningInfeasible("input", j);
    out.input_sets.push_back(std::move(s));
  }

  for (int j = 1; j <= horizon_n; ++j) {
    if (sat && j > sat_from) {
      out.state_sets.push_back(out.state_sets.back());
      continue;
    }
    Vec off = x_set.offsets();
    for (int e = 0; e < j; ++e) {
      const int i = j - 2 - e;
      if (i >= mm - 1) continue;
      if (i < 0)
        off -= support(set_of(e), xn);
      else
        off -= support(set_of(e), Mat(xn * entry(entry_policies, e).phi[i]));
    }
    PolytopeH s = x_set.with_offsets(std::move(off));
    if (is_empty(s)) throw TighteningInfeasible("state", j);
    out.state_sets.push_back(std::move(s));
  }
  return out;
}

int schedule_points_needed(GainPolicy gp, int horizon_m, int horizon_n) {
  switch (gp) {
    case GainPolicy::per_entry: return horizon_n + horizon_m;
    case GainPolicy::shared: return std::max(horizon_n, horizon_m) + 1;
    case GainPolicy::frozen: return horizon_n + 1;
  }
  return horizon_n + 1;
}

std::vector<DeadbeatPolicy> lpv_entry_policies(const LpvModel& model, const NominalSchedule& schedule,
                                               int horizon_m, int horizon_n, GainPolicy gp, double rank_tol) {
  std::vector<DeadbeatPolicy> out;
  switch (gp) {
    case GainPolicy::frozen:
      out.push_back(solve_gains_lti(model.a_bar, model.b_bar, horizon_m, rank_tol));
      break;
    case GainPolicy::shared:
      out.push_back(solve_gains(schedule.a_seq, schedule.b_seq, horizon_m, rank_tol));
      break;
    case GainPolicy::per_entry: {
      const int need = schedule_points_needed(gp, horizon_m, horizon_n);
      if (static_cast<int>(schedule.length()) < need)
        throw Error(ErrorKind::schedule_invalid, "per-entry gains need " + std::to_string(need) + " schedule points");
      for (int e = 0; e < horizon_n; ++e) {
        MatList a(schedule.a_seq.begin() + e + 1, schedule.a_seq.begin() + e + 1 + horizon_m);
        MatList b(schedule.b_seq.begin() + e + 1, schedule.b_seq.begin() + e + 1 + horizon_m);
        out.push_back(solve_gains(a, b, horizon_m, rank_tol));
      }
      break;
    }
  }
  return out;
}

}  // namespace drmpc
