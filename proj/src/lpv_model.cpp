#include "drmpc/lpv_model.hpp"

#include <string>

namespace drmpc {

namespace {

Vec delta_support(const LpvModel& model) {
  const PolytopeH& td = model.theta_delta_set;
  const Mat& normals = model.theta_set.normals();
  if (td.dim() <= 3) return support(vertices_of(td), normals);
  Vec out(normals.rows());
  for (Eigen::Index i = 0; i < normals.rows(); ++i) out(i) = support(td, Vec(normals.row(i).transpose()));
  return out;
}

std::vector<Vec> vertex_list(const PolytopeH& p, const char* name) {
  if (is_empty(p)) throw Error(ErrorKind::structural, std::string(name) + " is empty");
  return vertices_of(p).vertices();
}

}  // namespace

void LpvModel::validate() const {
  const int nn = n();
  const int mm = m();
  const int pp = p();
  require_dims(nn > 0 && a_bar.cols() == nn, "a_bar must be square");
  require_dims(b_bar.rows() == nn && mm > 0, "b_bar must have n rows");
  require_dims(static_cast<int>(b_terms.size()) == pp, "a_terms and b_terms must have the same length");
  for (const Mat& a : a_terms) require_dims(a.rows() == nn && a.cols() == nn, "a_terms entry must be n x n");
  for (const Mat& b : b_terms) require_dims(b.rows() == nn && b.cols() == mm, "b_terms entry must be n x m");
  require_dims(x_set.dim() == nn, "x_set dimension must be n");
  require_dims(u_set.dim() == mm, "u_set dimension must be m");
  require_dims(w_set.dim() == nn, "w_set dimension must be n");
  if (pp > 0) {
    require_dims(theta_set.dim() == pp, "theta_set dimension must be p");
    require_dims(theta_delta_set.dim() == pp, "theta_delta_set dimension must be p");
  }
  auto need_origin = [](bool ok, const char* name) {
    if (!ok) throw Error(ErrorKind::structural, std::string(name) + " must contain the origin");
  };
  need_origin(contains(x_set, Vec::Zero(nn)), "x_set");
  need_origin(contains(u_set, Vec::Zero(mm)), "u_set");
  need_origin(contains(w_set, Vec::Zero(nn)), "w_set");
  need_origin(contains(theta_set, Vec::Zero(theta_set.dim())), "theta_set");
  need_origin(contains(theta_delta_set, Vec::Zero(theta_delta_set.dim())), "theta_delta_set");
}

LpvModel LpvModel::with_theta_delta(double delta) const {
  if (!(delta >= 0.0)) throw Error(ErrorKind::config, "theta delta bound must be nonnegative");
  LpvModel out = *this;
  const int pp = std::max(1, p());
  out.theta_delta_set = PolytopeH::box(Vec::Constant(pp, -delta), Vec::Constant(pp, delta));
  return out;
}

std::pair<Mat, Mat> eval_matrices(const LpvModel& model, const Vec& theta) {
  require_dims(theta.size() == model.p(), "theta length must equal p");
  Mat a = model.a_bar;
  Mat b = model.b_bar;
  for (int i = 0; i < model.p(); ++i) {
    a += theta(i) * model.a_terms[i];
    b += theta(i) * model.b_terms[i];
  }
  return {a, b};
}

double schedule_margin(const LpvModel& model, const Vec& theta) {
  const PolytopeH& t = model.theta_set;
  return (t.normals() * theta + delta_support(model) - t.offsets()).maxCoeff();
}

NominalSchedule make_schedule(const LpvModel& model, const std::vector<Vec>& theta_path, int horizon_n) {
  if (horizon_n < 1) throw Error(ErrorKind::config, "horizon must be positive");
  if (static_cast<int>(theta_path.size()) < horizon_n + 1)
    throw Error(ErrorKind::schedule_invalid, "parameter path shorter than N + 1");
  NominalSchedule s;
  const Vec dsup = model.p() > 0 ? delta_support(model) : Vec();
  for (std::size_t j = 0; j < theta_path.size(); ++j) {
    const Vec& th = theta_path[j];
    require_dims(th.size() == model.p(), "parameter path entry length must equal p");
    if (j >= 1 && model.p() > 0) {
      const Vec gap = model.theta_set.normals() * th + dsup - model.theta_set.offsets();
      if (gap.maxCoeff() > kMembershipTol)
        throw Error(ErrorKind::schedule_invalid,
                    "nominal parameter at index " + std::to_string(j) + " plus Theta_Delta leaves Theta");
    }
    auto [a, b] = eval_matrices(model, th);
    s.theta_bar.push_back(th);
    s.a_seq.push_back(std::move(a));
    s.b_seq.push_back(std::move(b));
  }
  return s;
}

NominalSchedule constant_schedule(const LpvModel& model, const Vec& theta, std::size_t length) {
  auto [a, b] = eval_matrices(model, theta);
  NominalSchedule s;
  s.theta_bar.assign(length, theta);
  s.a_seq.assign(length, a);
  s.b_seq.assign(length, b);
  return s;
}

const char* to_string(DisturbanceKind k) {
  switch (k) {
    case DisturbanceKind::robust_D: return "robust_D";
    case DisturbanceKind::lpv_Dtheta: return "lpv_Dtheta";
    case DisturbanceKind::additive_W: return "additive_W";
  }
  return "unknown";
}

DisturbanceSet build_additive_set(const LpvModel& model, Mode kind) {
  const int nn = model.n();
  const std::vector<Vec> xs = vertex_list(model.x_set, "x_set");
  const std::vector<Vec> us = vertex_list(model.u_set, "u_set");
  const std::vector<Vec> ws = model.w_set.vertices();
  std::vector<Vec> thetas;
  if (model.p() > 0)
    thetas = vertex_list(kind == Mode::robust ? model.theta_set : model.theta_delta_set,
                         kind == Mode::robust ? "theta_set" : "theta_delta_set");
  else
    thetas.emplace_back(0);

  const std::size_t tuples = thetas.size() * xs.size() * us.size() * ws.size();
  if (tuples > kMaxVertexTuples)
    throw Error(ErrorKind::size, "additive set needs " + std::to_string(tuples) + " vertex tuples (cap " +
                                     std::to_string(kMaxVertexTuples) + ")");

  std::vector<Vec> pts;
  pts.reserve(tuples);
  for (const Vec& th : thetas) {
    Mat da = Mat::Zero(nn, nn);
    Mat db = Mat::Zero(nn, model.m());
    for (int i = 0; i < model.p(); ++i) {
      da += th(i) * model.a_terms[i];
      db += th(i) * model.b_terms[i];
    }
    for (const Vec& x : xs) {
      const Vec ax = da * x;
      for (const Vec& u : us) {
        const Vec axbu = ax + db * u;
        for (const Vec& w : ws) pts.push_back(axbu + w);
      }
    }
  }
  if (pts.empty()) throw Error(ErrorKind::structural, "empty vertex enumeration");
  return {PolytopeV(std::move(pts)), kind == Mode::robust ? DisturbanceKind::robust_D : DisturbanceKind::lpv_Dtheta};
}

}  // namespace drmpc
