#include "drmpc/io.hpp"

#include <cstdio>
#include <fstream>
#include <functional>

namespace drmpc::io {

namespace {

const Json& field(const Json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorKind::config, what + ": missing key '" + key + "'");
  return j.at(key);
}

}  // namespace

Json to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Mat matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::config, what + ": expected a nonempty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw Error(ErrorKind::config, what + ": rows must be nonempty arrays");
  Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw Error(ErrorKind::config, what + ": ragged matrix");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) throw Error(ErrorKind::config, what + ": non-numeric entry");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
  }
  return m;
}

Vec vector_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorKind::config, what + ": expected an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorKind::config, what + ": non-numeric entry");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Json to_json(const PolytopeH& p) { return {{"normals", to_json(p.normals())}, {"offsets", to_json(p.offsets())}}; }

Json to_json(const PolytopeV& p) { return {{"vertices", to_json(p.coords())}}; }

PolytopeH polytope_h_from_json(const Json& j, const std::string& what) {
  if (j.is_object() && j.contains("lower") && j.contains("upper"))
    return PolytopeH::box(vector_from_json(j["lower"], what + ".lower"), vector_from_json(j["upper"], what + ".upper"));
  return PolytopeH(matrix_from_json(field(j, "normals", what), what + ".normals"),
                   vector_from_json(field(j, "offsets", what), what + ".offsets"));
}

PolytopeV polytope_v_from_json(const Json& j, const std::string& what) {
  return PolytopeV::from_rows(matrix_from_json(field(j, "vertices", what), what + ".vertices"));
}

Json to_json(const LpvModel& m) {
  Json a = Json::array(), b = Json::array();
  for (const Mat& x : m.a_terms) a.push_back(to_json(x));
  for (const Mat& x : m.b_terms) b.push_back(to_json(x));
  return {{"a_bar", to_json(m.a_bar)},
          {"a_terms", a},
          {"b_bar", to_json(m.b_bar)},
          {"b_terms", b},
          {"theta_set", to_json(m.theta_set)},
          {"theta_delta_set", to_json(m.theta_delta_set)},
          {"w_set", to_json(m.w_set)},
          {"x_set", to_json(m.x_set)},
          {"u_set", to_json(m.u_set)}};
}

LpvModel model_from_json(const Json& j) {
  const std::string w = "model";
  MatList a_terms, b_terms;
  for (const Json& x : field(j, "a_terms", w)) a_terms.push_back(matrix_from_json(x, "model.a_terms"));
  for (const Json& x : field(j, "b_terms", w)) b_terms.push_back(matrix_from_json(x, "model.b_terms"));
  LpvModel m{matrix_from_json(field(j, "a_bar", w), "model.a_bar"),
             std::move(a_terms),
             matrix_from_json(field(j, "b_bar", w), "model.b_bar"),
             std::move(b_terms),
             polytope_h_from_json(field(j, "theta_set", w), "model.theta_set"),
             polytope_h_from_json(field(j, "theta_delta_set", w), "model.theta_delta_set"),
             polytope_v_from_json(field(j, "w_set", w), "model.w_set"),
             polytope_h_from_json(field(j, "x_set", w), "model.x_set"),
             polytope_h_from_json(field(j, "u_set", w), "model.u_set")};
  m.validate();
  return m;
}

Json to_json(const DeadbeatPolicy& p) {
  Json g = Json::array(), f = Json::array();
  for (const Mat& k : p.gains) g.push_back(to_json(k));
  for (const Mat& k : p.phi) f.push_back(to_json(k));
  return {{"horizon_m", p.horizon_m}, {"gains", g}, {"phi", f}, {"residual", p.residual}};
}

DeadbeatPolicy policy_from_json(const Json& j) {
  DeadbeatPolicy p;
  p.horizon_m = field(j, "horizon_m", "policy").get<int>();
  for (const Json& k : field(j, "gains", "policy")) p.gains.push_back(matrix_from_json(k, "policy.gains"));
  for (const Json& k : field(j, "phi", "policy")) p.phi.push_back(matrix_from_json(k, "policy.phi"));
  p.residual = field(j, "residual", "policy").get<double>();
  if (static_cast<int>(p.gains.size()) != p.horizon_m || static_cast<int>(p.phi.size()) != p.horizon_m - 1)
    throw Error(ErrorKind::config, "policy: gain/phi counts do not match horizon_m");
  return p;
}

Json to_json(const TightenedSets& s) {
  Json in = Json::array(), st = Json::array();
  for (const PolytopeH& p : s.input_sets) in.push_back(to_json(p));
  for (const PolytopeH& p : s.state_sets) st.push_back(to_json(p));
  return {{"mode", to_string(s.mode)}, {"horizon_m", s.horizon_m}, {"input_sets", in}, {"state_sets", st}};
}

Json to_json(const SimTrace& t) {
  Json steps = Json::array();
  for (std::size_t k = 0; k < t.inputs.size(); ++k) {
    const MonitorReport& r = t.monitors[k];
    steps.push_back({{"k", k},
                     {"x", to_json(t.states[k])},
                     {"u", to_json(t.inputs[k])},
                     {"theta", to_json(t.thetas[k])},
                     {"theta_bar", to_json(t.theta_bars[k])},
                     {"w", to_json(t.disturbances[k])},
                     {"value", t.values[k]},
                     {"stage_cost", t.stage_costs[k]},
                     {"status", solver::to_string(t.statuses[k])},
                     {"shift_checked", r.shift_checked},
                     {"shift_ok", r.shift_ok},
                     {"shift_margin", r.shift_margin},
                     {"disturbance_norm", r.disturbance_norm}});
  }
  return {{"steps", steps},
          {"final_state", t.states.empty() ? Json::array() : to_json(t.states.back())},
          {"initial_infeasible", t.initial_infeasible},
          {"recursive_feasibility_violation", t.recursive_feasibility_violation},
          {"infeasible_steps", t.infeasible_steps},
          {"all_shift_ok", t.all_shift_ok()}};
}

Json to_json(const RincTable& t) {
  Json per = Json::object(), inc = Json::object(), areas = Json::array();
  for (const auto& [n, r] : t.per_n)
    per[std::to_string(n)] = {{"mean_area", r.mean_area}, {"min_area", r.min_area}, {"max_area", r.max_area},
                              {"r_avmin", r.r_avmin},     {"r_avmax", r.r_avmax}};
  for (const auto& [n, s] : t.r_inc) inc[std::to_string(n)] = {{"mean", s.mean}, {"stddev", s.stddev}};
  for (const auto& a : t.areas) {
    Json row = Json::object();
    for (const auto& [n, v] : a) row[std::to_string(n)] = v;
    areas.push_back(row);
  }
  return {{"delta_max", t.delta_max}, {"realizations", t.realizations}, {"resampled", t.resampled},
          {"per_n", per},           {"r_inc", inc},                   {"areas", areas}};
}

Json to_json(const RoaResult& r) {
  std::vector<int> res(r.grid.resolution.begin(), r.grid.resolution.end());
  Json j = {{"grid", {{"lower", to_json(r.grid.lower)}, {"upper", to_json(r.grid.upper)}, {"resolution", res}}},
            {"feasible_count", r.feasible_count()},
            {"area_cells", r.area}};
  if (r.grid.dim() == 2) j["area_hull"] = area(r, AreaMethod::hull);
  if (r.hull_vertices) j["hull_vertices"] = to_json(r.hull_vertices->coords());
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::config, "invalid JSON in '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::config, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

std::string content_hash(const Json& j) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016zx", std::hash<std::string>{}(j.dump()));
  return buf;
}

}  // namespace drmpc::io
