#include "dfh/problems.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>

namespace dfh {

namespace {

const double kOmega = std::sqrt(3.0);

using V3 = Eigen::Vector3d;

V3 scalar(double v) { return V3(v, 0, 0); }

double g_wave(const Vec3& x) { return std::sin(x[0]) * std::sin(x[1]) * std::sin(x[2]); }
V3 grad_g_wave(const Vec3& x) {
  const double sx = std::sin(x[0]), sy = std::sin(x[1]), sz = std::sin(x[2]);
  const double cx = std::cos(x[0]), cy = std::cos(x[1]), cz = std::cos(x[2]);
  return V3(cx * sy * sz, sx * cy * sz, sx * sy * cz);
}

V3 g_max(const Vec3& x) {
  return V3(-std::cos(x[0]) * std::sin(x[1]) * std::sin(x[2]), 0.0, std::sin(x[0]) * std::sin(x[1]) * std::cos(x[2]));
}
V3 curl_g_max(const Vec3& x) {
  const double sx = std::sin(x[0]), sy = std::sin(x[1]), sz = std::sin(x[2]);
  const double cx = std::cos(x[0]), cy = std::cos(x[1]), cz = std::cos(x[2]);
  return V3(sx * cy * cz, -2 * cx * sy * cz, cx * cy * sz);
}

Field make(int comps, const TimeProfile& f, std::vector<Field::Term> terms) {
  Field r;
  r.components = comps;
  r.profile = f;
  r.terms = std::move(terms);
  return r;
}

Field zero_field(int comps, const TimeProfile& f) { return make(comps, f, {}); }

template <class F>
void for_quad_cell(const CellGeometry& g, F&& fn) {
  const auto& q = tet_rule();
  for (std::size_t i = 0; i < q.weight.size(); ++i) fn(q.bary[i], q.weight[i] * 6 * g.volume);
}

double dof_value(int k, const Field& v, const Mesh& mesh, double t, int e) {
  switch (k) {
    case 0: return v(mesh.vertices[e], t)[0];
    case 1: {
      const Vec3 a = mesh.vertices[mesh.edges[e][0]], b = mesh.vertices[mesh.edges[e][1]];
      const Vec3 tau = b - a;
      const auto& q = line_rule();
      double s = 0;
      for (std::size_t i = 0; i < q.s.size(); ++i) s += q.weight[i] * v(a + q.s[i] * tau, t).dot(tau);
      return s;
    }
    case 2: {
      const auto& f = mesh.faces[e];
      const Vec3 a = mesh.vertices[f[0]], b = mesh.vertices[f[1]], c = mesh.vertices[f[2]];
      const Vec3 N = (b - a).cross(c - a);  // twice the area along the canonical normal
      const auto& q = tri_rule();
      double s = 0;
      for (std::size_t i = 0; i < q.weight.size(); ++i) {
        const Vec3 x = q.bary[i][0] * a + q.bary[i][1] * b + q.bary[i][2] * c;
        s += q.weight[i] * v(x, t).dot(N);
      }
      return s;
    }
    case 3: {
      CellGeometry g = cell_geometry(mesh, e);
      double s = 0;
      for_quad_cell(g, [&](const Eigen::Vector4d& b, double w) { s += w * v(g.point(b), t)[0]; });
      return s;
    }
  }
  throw std::invalid_argument("interpolate: bad degree");
}

}  // namespace

Problem parse_problem(const std::string& s) {
  if (s == "wave") return Problem::wave;
  if (s == "maxwell") return Problem::maxwell;
  throw std::invalid_argument("unknown problem '" + s + "'");
}

Profile parse_profile(const std::string& s) {
  if (s == "eigenmode") return Profile::eigenmode;
  if (s == "quadratic") return Profile::quadratic;
  throw std::invalid_argument("unknown profile '" + s + "'");
}

std::string to_string(Problem p) { return p == Problem::wave ? "wave" : "maxwell"; }
std::string to_string(Profile p) { return p == Profile::eigenmode ? "eigenmode" : "quadratic"; }

double TimeProfile::operator()(int order, double t) const {
  if (kind == Profile::quadratic) {
    switch (order) {
      case 0: return 0.5 * t * t;
      case 1: return t;
      case 2: return 1.0;
      default: return 0.0;
    }
  }
  // d^k/dt^k [sin(wt) + cos(wt)] = w^k [sin(wt + k pi/2) + cos(wt + k pi/2)]
  const double s = std::sin(kOmega * t), c = std::cos(kOmega * t);
  double a;
  switch (order % 4) {
    case 0: a = s + c; break;
    case 1: a = c - s; break;
    case 2: a = -s - c; break;
    default: a = s - c; break;
  }
  return std::pow(kOmega, order) * a;
}

V3 Field::operator()(const Vec3& x, double t) const {
  V3 r = V3::Zero();
  for (const auto& term : terms) r += term.scale * profile(term.order, t) * term.space(x);
  return r;
}

Field Field::time_derivative() const {
  Field r = *this;
  for (auto& term : r.terms) ++term.order;
  if (profile.kind == Profile::quadratic) {
    std::vector<Term> keep;
    for (auto& term : r.terms)
      if (term.order <= 2) keep.push_back(term);
    r.terms = keep;
  }
  return r;
}

Weights ManufacturedCase::weights() const {
  if (problem == Problem::wave) return Weights{1.0 / (c * c), 1.0};
  return Weights{eps, mu};
}

ManufacturedCase wave_case(Profile profile, double c) {
  if (!(c > 0)) throw std::invalid_argument("wave speed must be positive");
  ManufacturedCase mc;
  mc.problem = Problem::wave;
  mc.profile = profile;
  mc.p = 3;
  mc.c = c;
  TimeProfile f{profile};
  Proxy g = [](const Vec3& x) { return scalar(g_wave(x)); };
  Proxy gg = [](const Vec3& x) { return grad_g_wave(x); };
  // p = g f', sigma = -grad g f
  mc.alpha = make(1, f, {{g, 1, 1.0}});
  mc.beta = make(3, f, {{gg, 0, -1.0}});
  // c^-2 p_t + div sigma = xi with div sigma = 3 g f
  const bool unforced = profile == Profile::eigenmode && c == 1.0;
  mc.source = unforced ? zero_field(1, f) : make(1, f, {{g, 2, 1.0 / (c * c)}, {g, 0, 3.0}});
  mc.d_alpha = {make(3, f, {{gg, 1, 1.0}}), zero_field(3, f), zero_field(1, f)};
  mc.d_beta = {zero_field(3, f), zero_field(3, f), make(1, f, {{g, 0, 3.0}})};
  return mc;
}

ManufacturedCase maxwell_case(Profile profile, double eps, double mu) {
  if (!(eps > 0) || !(mu > 0)) throw std::invalid_argument("eps and mu must be positive");
  ManufacturedCase mc;
  mc.problem = Problem::maxwell;
  mc.profile = profile;
  mc.p = 2;
  mc.eps = eps;
  mc.mu = mu;
  TimeProfile f{profile};
  Proxy g = [](const Vec3& x) { return g_max(x); };
  Proxy cg = [](const Vec3& x) { return curl_g_max(x); };
  // E = g f', H = -curl g f / mu, curl curl g = 3 g
  mc.alpha = make(3, f, {{g, 1, 1.0}});
  mc.beta = make(3, f, {{cg, 0, -1.0 / mu}});
  const bool unforced = profile == Profile::eigenmode && eps * mu == 1.0;
  mc.source = unforced ? zero_field(3, f) : make(3, f, {{g, 2, eps}, {g, 0, 3.0 / mu}});
  mc.d_alpha = {zero_field(3, f), make(3, f, {{cg, 1, 1.0}}), zero_field(1, f)};
  mc.d_beta = {zero_field(3, f), make(3, f, {{g, 0, -3.0 / mu}}), zero_field(1, f)};
  return mc;
}

Eigen::VectorXd interpolate(int k, const Field& v, const Mesh& mesh, double t, const std::vector<int>& entities) {
  Eigen::VectorXd r(entities.size());
  for (std::size_t i = 0; i < entities.size(); ++i) r[i] = dof_value(k, v, mesh, t, entities[i]);
  return r;
}

Eigen::VectorXd interpolate(int k, const Field& v, const Mesh& mesh, double t) {
  std::vector<int> all(mesh.num_entities(k));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = int(i);
  return interpolate(k, v, mesh, t, all);
}

Eigen::VectorXd interpolate_broken(int k, const Field& v, const Mesh& mesh, double t) {
  if (k == 3) return interpolate(3, v, mesh, t);
  return assemble_conforming_map(k, mesh).mat * interpolate(k, v, mesh, t);
}

Eigen::VectorXd load_broken(int k, const Field& v, const Mesh& mesh, double t) {
  const int N = num_local_dofs(k);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.num_cells() * N);
  if (v.zero()) return b;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    CellGeometry g = cell_geometry(mesh, c);
    for_quad_cell(g, [&](const Eigen::Vector4d& bary, double w) {
      Eigen::MatrixXd B = eval_basis(k, g, bary);
      V3 val = v(g.point(bary), t);
      b.segment(c * N, N) += w * B * val.head(B.cols());
    });
  }
  return b;
}

Eigen::VectorXd project_broken(int k, const Field& v, const Mesh& mesh, double t) {
  const int N = num_local_dofs(k);
  Eigen::VectorXd b = load_broken(k, v, mesh, t);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    Eigen::MatrixXd M = local_mass(k, cell_geometry(mesh, c));
    b.segment(c * N, N) = M.llt().solve(Eigen::VectorXd(b.segment(c * N, N)));
  }
  return b;
}

Eigen::VectorXd project_conforming(int k, const Field& v, const Mesh& mesh, double t, const std::vector<int>& fixed,
                                   const Eigen::VectorXd& values) {
  if (k == 3) return project_broken(3, v, mesh, t);
  if (Eigen::Index(fixed.size()) != values.size()) throw std::invalid_argument("project_conforming: fixed/values mismatch");
  SpMat G = assemble_conforming_map(k, mesh).mat;
  SpMat M = assemble_broken(k, mesh).M.mat;
  SpMat K = G.transpose() * M * G;
  Eigen::VectorXd rhs = G.transpose() * load_broken(k, v, mesh, t);
  const int n = int(K.rows());
  std::vector<char> is_fixed(n, 0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    is_fixed[fixed[i]] = 1;
    x[fixed[i]] = values[i];
  }
  std::vector<int> fr;
  for (int i = 0; i < n; ++i)
    if (!is_fixed[i]) fr.push_back(i);
  if (fr.empty()) return x;
  SpMat Kf = select_cols(select_rows(K, fr), fr);
  Eigen::VectorXd r = select_rows(K, fr) * x;
  Eigen::VectorXd bf(fr.size());
  for (std::size_t i = 0; i < fr.size(); ++i) bf[i] = rhs[fr[i]] - r[i];
  Eigen::SimplicialLDLT<SpMat> ldlt(Kf);
  if (ldlt.info() != Eigen::Success) throw NumericalError("conforming mass factorization failed");
  Eigen::VectorXd xf = ldlt.solve(bf);
  for (std::size_t i = 0; i < fr.size(); ++i) x[fr[i]] = xf[i];
  return x;
}

Eigen::VectorXd input_u1(const ManufacturedCase& mc, const Mesh& mesh, double t, const std::vector<int>& entities) {
  return interpolate(4 - mc.p - 1, mc.alpha, mesh, t, entities);
}

Eigen::VectorXd input_u2(const ManufacturedCase& mc, const Mesh& mesh, double t, const std::vector<int>& entities) {
  const int k = mc.p - 1;
  const double sg = (mc.p % 2 == 0) ? 1.0 : -1.0;
  Eigen::VectorXd r = interpolate(k, mc.beta, mesh, t, entities);
  Eigen::VectorXd rho = outer_entity_signs(k, mesh);
  for (std::size_t i = 0; i < entities.size(); ++i) r[i] *= sg * rho[entities[i]];
  return r;
}

CaseDriver::CaseDriver(const ManufacturedCase& mc, Formulation f, const Mesh& mesh, const BoundaryPartition& bp)
    : mc_(mc), f_(f), deg_(make_degrees(f, mc.p)), mesh_(&mesh), bp_(&bp) {
  ul_entities_ = essential_entities(deg_.ul_degree(), mesh, bp, deg_.essential());
  ug_entities_ = closure_entities(deg_.ug_degree(), mesh, deg_.natural() == 1 ? bp.gamma1_faces : bp.gamma2_faces);
  G_ = assemble_conforming_map(deg_.trace(), mesh).mat;
}

Eigen::VectorXd CaseDriver::ul(double t, bool dt) const {
  if (zero_inputs_) return Eigen::VectorXd::Zero(ul_entities_.size());
  ManufacturedCase mc = mc_;
  if (dt) {
    mc.alpha = mc.alpha.time_derivative();
    mc.beta = mc.beta.time_derivative();
  }
  return f_ == Formulation::primal ? input_u2(mc, *mesh_, t, ul_entities_) : input_u1(mc, *mesh_, t, ul_entities_);
}

Eigen::VectorXd CaseDriver::ug(double t) const {
  if (zero_inputs_) return Eigen::VectorXd::Zero(ug_entities_.size());
  return f_ == Formulation::primal ? input_u1(mc_, *mesh_, t, ug_entities_) : input_u2(mc_, *mesh_, t, ug_entities_);
}

Eigen::VectorXd CaseDriver::hybrid_load(const SystemBlocks& s, double t) const {
  if (!mc_.forced() || zero_inputs_) return {};
  Eigen::VectorXd F = Eigen::VectorXd::Zero(s.nl_total());
  F.segment(s.off_alpha(), s.na) = load_broken(deg_.alpha(), mc_.source, *mesh_, t);
  return F;
}

Eigen::VectorXd CaseDriver::mixed_load(const MixedSystem& m, double t) const {
  if (!mc_.forced() || zero_inputs_) return {};
  Eigen::VectorXd F = Eigen::VectorXd::Zero(m.dim());
  Eigen::VectorXd b = load_broken(deg_.alpha(), mc_.source, *mesh_, t);
  F.head(m.na) = m.alpha_conforming ? Eigen::VectorXd(G_.transpose() * b) : b;
  return F;
}

StepInputs CaseDriver::hybrid_inputs(const SystemBlocks& s, double t) const { return StepInputs{ul(t), ug(t), hybrid_load(s, t)}; }

StepInputs CaseDriver::mixed_inputs(const MixedSystem& m, double t) const { return StepInputs{ul(t), ug(t), mixed_load(m, t)}; }

Eigen::VectorXd CaseDriver::mixed_initial_state(const MixedSystem& m, double t) const {
  const int kc = deg_.trace();
  const Field& conf_field = f_ == Formulation::primal ? mc_.beta : mc_.alpha;
  const Field& brk_field = f_ == Formulation::primal ? mc_.alpha : mc_.beta;
  const int kb = f_ == Formulation::primal ? deg_.alpha() : deg_.beta();
  Eigen::VectorXd fixed = zero_inputs_ ? Eigen::VectorXd::Zero(ul_entities_.size())
                                       : interpolate(kc, conf_field, *mesh_, t, ul_entities_);
  Eigen::VectorXd conf = project_conforming(kc, conf_field, *mesh_, t, ul_entities_, fixed);
  Eigen::VectorXd brk = project_broken(kb, brk_field, *mesh_, t);
  Eigen::VectorXd x(m.dim());
  if (f_ == Formulation::primal) x << brk, conf;
  else x << conf, brk;
  return x;
}

Eigen::VectorXd CaseDriver::conforming_to_broken(const Eigen::VectorXd& x) const {
  const int nc = int(G_.cols());
  const int nb = int(x.size()) - nc;
  Eigen::VectorXd r(nb + G_.rows());
  if (f_ == Formulation::primal) r << x.head(nb), G_ * x.tail(nc);
  else r << G_ * x.head(nc), x.tail(nb);
  return r;
}

Eigen::VectorXd CaseDriver::hybrid_initial_state(double t) const {
  MixedSystem dims;
  const int nc = int(G_.cols());
  const int nbk = mesh_->num_cells() * num_local_dofs(f_ == Formulation::primal ? deg_.alpha() : deg_.beta());
  dims.na = f_ == Formulation::primal ? nbk : nc;
  dims.nb = f_ == Formulation::primal ? nc : nbk;
  return conforming_to_broken(mixed_initial_state(dims, t));
}

PhState CaseDriver::hybrid_initial(const SystemBlocks& s, double t) const {
  InitialInputs in{ul(t), ul(t, true), ug(t), hybrid_load(s, t)};
  return consistent_initialization(s, hybrid_initial_state(t), in, t);
}

}  // namespace dfh
