#include "dfh/diagnostics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace dfh {

namespace {

template <class F>
void for_quad_cell(const CellGeometry& g, F&& fn) {
  const auto& q = tet_rule();
  for (std::size_t i = 0; i < q.weight.size(); ++i) fn(q.bary[i], q.weight[i] * 6 * g.volume);
}

}  // namespace

double hamiltonian(const SystemBlocks& s, const PhState& x) { return energy(s.E, x.xl); }

double power_residual(const SystemBlocks& s, const PhState& x0, const PhState& x1, const StepInputs& mid, double dt) {
  MidpointPower p = midpoint_power(s, x0, x1, mid);
  return (hamiltonian(s, x1) - hamiltonian(s, x0)) / dt - p.boundary - p.source;
}

Eigen::VectorXd facet_load(int k, const FacetTrace& w, const Mesh& mesh) {
  const int N = num_local_dofs(k);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.num_cells() * N);
  const auto& q = tri_rule();
  for (int t = 0; t < mesh.num_cells(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (int lf = 0; lf < 4; ++lf) {
      const double A = g.face_area(lf);
      for (std::size_t p = 0; p < q.weight.size(); ++p) {
        Eigen::Vector4d bary = g.face_point(lf, q.bary[p]);
        Eigen::MatrixXd T = eval_trace(k, g, lf, bary);
        Eigen::Vector3d v = w(t, lf, g.point(bary));
        b.segment(t * N, N) += (q.weight[p] * 2 * A) * T * v.head(T.cols());
      }
    }
  }
  return b;
}

Eigen::VectorXd facet_annihilator_projection(int k, const FacetTrace& w, const Mesh& mesh) {
  if (k < 0 || k > 2) throw std::invalid_argument("facet projection needs k <= 2");
  const int N = num_local_dofs(k);
  Eigen::VectorXd b = facet_load(k, w, mesh);
  for (int t = 0; t < mesh.num_cells(); ++t) {
    Eigen::MatrixXd Mf = local_facet_mass(k, cell_geometry(mesh, t));
    b.segment(t * N, N) = Mf.llt().solve(Eigen::VectorXd(b.segment(t * N, N)));
  }
  return b;
}

double facet_norm(int k, const Eigen::VectorXd& v, const Mesh& mesh) {
  const int N = num_local_dofs(k);
  double s = 0;
  for (int t = 0; t < mesh.num_cells(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    Eigen::VectorXd vt = v.segment(t * N, N);
    s += g.diameter * vt.dot(local_facet_mass(k, g) * vt);
  }
  return std::sqrt(s);
}

FacetTrace exact_normal_trace(const ManufacturedCase& mc, Formulation f, const Mesh& mesh, double t) {
  const bool primal = f == Formulation::primal;
  const Field field = primal ? mc.alpha : mc.beta;
  const bool wave = mc.problem == Problem::wave;
  const Mesh* m = &mesh;
  return [=](int c, int lf, const Vec3& x) -> Eigen::Vector3d {
    const int out = m->face_outward[c][lf];
    const auto& fv = m->faces[m->cell_faces[c][lf]];
    const Vec3 a = m->vertices[fv[0]], b = m->vertices[fv[1]], d = m->vertices[fv[2]];
    const Vec3 n = (b - a).cross(d - a).normalized() * double(out);
    Eigen::Vector3d v = field(x, t);
    if (wave) return Eigen::Vector3d(primal ? out * v[0] : v.dot(n), 0, 0);
    return v.cross(n);
  };
}

Eigen::VectorXd canonical_multiplier(const SystemBlocks& s, const PhState& x, const Mesh& mesh) {
  Eigen::VectorXd l = x.xl.segment(s.off_lambda(), s.nl);
  if (s.deg.form == Formulation::primal && s.deg.trace() == 2) l = l.cwiseProduct(outer_signs(2, mesh));
  return l;
}

double l2_error(int k, const Eigen::VectorXd& x, const Field& v, const Mesh& mesh, double t) {
  const int N = num_local_dofs(k);
  double s = 0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    CellGeometry g = cell_geometry(mesh, c);
    for_quad_cell(g, [&](const Eigen::Vector4d& b, double w) {
      Eigen::MatrixXd B = eval_basis(k, g, b);
      Eigen::VectorXd uh = B.transpose() * x.segment(c * N, N);
      s += w * (uh - v(g.point(b), t).head(B.cols())).squaredNorm();
    });
  }
  return std::sqrt(s);
}

double d_error(int k, const Eigen::VectorXd& x, const Field& dv, const Mesh& mesh, double t) {
  if (k < 0 || k > 2) throw std::invalid_argument("d_error needs k <= 2");
  const int N = num_local_dofs(k);
  double s = 0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    CellGeometry g = cell_geometry(mesh, c);
    for_quad_cell(g, [&](const Eigen::Vector4d& b, double w) {
      Eigen::MatrixXd B = eval_dbasis(k, g, b);
      Eigen::VectorXd uh = B.transpose() * x.segment(c * N, N);
      s += w * (uh - dv(g.point(b), t).head(B.cols())).squaredNorm();
    });
  }
  return std::sqrt(s);
}

double l2_norm(int k, const Eigen::VectorXd& x, const Mesh& mesh) {
  const int N = num_local_dofs(k);
  double s = 0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    Eigen::VectorXd xc = x.segment(c * N, N);
    s += xc.dot(local_mass(k, cell_geometry(mesh, c)) * xc);
  }
  return std::sqrt(std::max(s, 0.0));
}

double l2_distance(int ka, const Eigen::VectorXd& a, int kb, const Eigen::VectorXd& b, const Mesh& mesh) {
  if (proxy_components(ka) != proxy_components(kb)) throw std::invalid_argument("l2_distance: proxies of different shape");
  const int Na = num_local_dofs(ka), Nb = num_local_dofs(kb);
  double s = 0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    CellGeometry g = cell_geometry(mesh, c);
    for_quad_cell(g, [&](const Eigen::Vector4d& q, double w) {
      Eigen::VectorXd ua = eval_basis(ka, g, q).transpose() * a.segment(c * Na, Na);
      Eigen::VectorXd ub = eval_basis(kb, g, q).transpose() * b.segment(c * Nb, Nb);
      s += w * (ua - ub).squaredNorm();
    });
  }
  return std::sqrt(s);
}

double ErrorReport::get(const std::string& variable, const std::string& norm) const {
  for (const auto& e : entries)
    if (e.variable == variable && e.norm == norm) return e.error;
  throw std::invalid_argument("no error entry " + variable + "/" + norm);
}

std::string alpha_name(Problem p) { return p == Problem::wave ? "pressure" : "electric"; }
std::string beta_name(Problem p) { return p == Problem::wave ? "velocity" : "magnetic"; }

std::string norm_name(int k) {
  switch (k) {
    case 0: return "H1";
    case 1: return "Hcurl";
    case 2: return "Hdiv";
  }
  throw std::invalid_argument("no graph norm for degree " + std::to_string(k));
}

ErrorReport error_norms(const ManufacturedCase& mc, const SystemBlocks& s, const PhState& x, const Mesh& mesh, double t) {
  if (s.deg.p != mc.p) throw std::invalid_argument("error_norms: system and case differ");
  ErrorReport r;
  r.h = mesh.max_diameter();
  struct Var {
    std::string name;
    int k;
    Eigen::VectorXd v;
    const Field* f;
    const std::array<Field, 3>* d;
  };
  Var vars[2] = {{alpha_name(mc.problem), s.deg.alpha(), x.xl.segment(s.off_alpha(), s.na), &mc.alpha, &mc.d_alpha},
                 {beta_name(mc.problem), s.deg.beta(), x.xl.segment(s.off_beta(), s.nb), &mc.beta, &mc.d_beta}};
  for (const auto& v : vars) {
    double l2 = l2_error(v.k, v.v, *v.f, mesh, t);
    r.entries.push_back({v.name, "L2", l2});
    if (v.k < 3) {
      double dd = d_error(v.k, v.v, (*v.d)[v.k], mesh, t);
      r.entries.push_back({v.name, norm_name(v.k), std::sqrt(l2 * l2 + dd * dd)});
    }
  }
  const int kt = s.deg.trace();
  Eigen::VectorXd P = facet_annihilator_projection(kt, exact_normal_trace(mc, s.deg.form, mesh, t), mesh);
  r.entries.push_back({"normal_trace", "facet", facet_norm(kt, canonical_multiplier(s, x, mesh) - P, mesh)});
  return r;
}

double divergence_norm(const Eigen::VectorXd& x, const Mesh& mesh) {
  if (x.size() != 4 * mesh.num_cells()) throw std::invalid_argument("divergence_norm expects a broken 2-cochain");
  double s = 0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    double d = (incidence(2, mesh.orientation[c]).cast<double>() * x.segment(4 * c, 4))[0];
    s += d * d / mesh.volume[c];
  }
  return std::sqrt(s);
}

double fit_rate(const std::vector<double>& h, const std::vector<double>& e) {
  if (h.size() != e.size() || h.size() < 2) throw std::invalid_argument("fit_rate needs at least two (h, error) pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0) || !(e[i] > 0)) throw std::invalid_argument("fit_rate needs positive values");
    const double x = std::log(h[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0) throw std::invalid_argument("fit_rate needs distinct h values");
  return (n * sxy - sx * sy) / den;
}

std::vector<DofRow> dof_table(Formulation f, int p, const std::vector<long long>& ns) {
  // ratios printed in the published tables at s = 1
  static const std::map<long long, int> wave_primal{{1, 75}, {2, 71}, {4, 69}, {8, 68}, {16, 67}};
  static const std::map<long long, int> wave_dual{{1, 18}, {2, 9}, {4, 5}, {8, 4}, {16, 3}};
  static const std::map<long long, int> maxwell{{1, 44}, {2, 38}, {4, 28}, {8, 25}, {16, 24}};
  const std::map<long long, int>* ref = p == 2 ? &maxwell : (f == Formulation::primal ? &wave_primal : &wave_dual);
  if (p != 2 && p != 3) ref = nullptr;
  std::vector<DofRow> rows;
  for (long long n : ns) {
    if (n < 1) throw std::invalid_argument("dof_table: n must be positive");
    DofCount c = dof_count(f, p, n);
    DofRow r;
    r.n = n;
    r.mixed = c.mixed;
    r.hybrid = c.hybrid;
    r.ratio = int(std::floor(100.0 * double(c.hybrid) / double(c.mixed) + 0.5));
    if (ref) {
      auto it = ref->find(n);
      if (it != ref->end()) r.reference = it->second;
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace dfh
