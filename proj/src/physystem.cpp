#include "dfh/physystem.hpp"
#include "dfh/parallel.hpp"

#include <stdexcept>

namespace dfh {

namespace {

void place(Triplets& tr, const SpMat& A, int r0, int c0, double s = 1.0) {
  for (int j = 0; j < A.outerSize(); ++j)
    for (SpMat::InnerIterator it(A, j); it; ++it) tr.emplace_back(r0 + it.row(), c0 + it.col(), s * it.value());
}

void place(Triplets& tr, const Eigen::MatrixXd& A, const std::vector<int>& rows, const std::vector<int>& cols) {
  for (int j = 0; j < A.cols(); ++j)
    for (int i = 0; i < A.rows(); ++i)
      if (A(i, j) != 0.0) tr.emplace_back(rows[i], cols[j], A(i, j));
}

SpMat from(const Triplets& tr, int r, int c) {
  SpMat A(r, c);
  A.setFromTriplets(tr.begin(), tr.end());
  return A;
}

int sign_pow(int e) { return (e % 2 == 0) ? 1 : -1; }

std::vector<int> range(int a, int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + i;
  return v;
}

void check_p(int p) {
  if (p < 1 || p > 3) throw std::invalid_argument("form degree p must lie in 1..3");
}

}  // namespace

Degrees make_degrees(Formulation f, int p) {
  check_p(p);
  Degrees d;
  d.p = p;
  d.q = 4 - p;
  d.form = f;
  return d;
}

std::vector<int> SystemBlocks::cell_indices(int t) const {
  const int Na = na / num_cells, Nb = nb / num_cells, Nl = nl / num_cells;
  std::vector<int> idx;
  idx.reserve(Na + Nb + Nl);
  for (int i = 0; i < Na; ++i) idx.push_back(off_alpha() + t * Na + i);
  for (int i = 0; i < Nb; ++i) idx.push_back(off_beta() + t * Nb + i);
  for (int i = 0; i < Nl; ++i) idx.push_back(off_lambda() + t * Nl + i);
  return idx;
}

std::vector<int> essential_entities(int k, const Mesh& mesh, const BoundaryPartition& bp, int essential) {
  return closure_entities(k, mesh, essential == 1 ? bp.gamma1_faces : bp.gamma2_faces);
}

std::vector<int> free_trace_entities(int k, const Mesh& mesh, const BoundaryPartition& bp, int essential) {
  std::vector<int> out;
  for (int e = 0; e < mesh.num_entities(k); ++e)
    if (!bp.in_closure(k, e, essential)) out.push_back(e);
  return out;
}

namespace {

// shared skeleton of both hybrid builders
SystemBlocks hybrid_skeleton(const Degrees& d, const Mesh& mesh, const BoundaryPartition& bp) {
  SystemBlocks s;
  s.deg = d;
  s.num_cells = mesh.num_cells();
  const int C = mesh.num_cells();
  s.na = C * num_local_dofs(d.alpha());
  s.nb = C * num_local_dofs(d.beta());
  s.nl = C * num_local_dofs(d.trace());
  s.g_entities = free_trace_entities(d.trace(), mesh, bp, d.essential());
  s.ul_entities = essential_entities(d.ul_degree(), mesh, bp, d.essential());
  s.ug_entities = closure_entities(d.ug_degree(), mesh, d.natural() == 1 ? bp.gamma1_faces : bp.gamma2_faces);
  Orientation o = d.form == Formulation::primal ? Orientation::outer : Orientation::inner;
  s.alpha_space = broken_space(d.alpha(), mesh, o);
  s.beta_space = broken_space(d.beta(), mesh, o);
  s.lambda_space = facet_broken_space(d.trace(), mesh, o);
  s.g_space = facet_unbroken_space(d.trace(), mesh, o);
  s.g_space.dim = s.ng();
  return s;
}

SpMat natural_pairing(const Degrees& d, const Mesh& mesh, const BoundaryPartition& bp, const std::vector<int>& rows,
                      const std::vector<int>& cols) {
  const auto& faces = d.natural() == 1 ? bp.gamma1_faces : bp.gamma2_faces;
  SpMat Psi = assemble_boundary_pairing(d.trace(), d.ug_degree(), mesh, faces).mat;
  double s = d.form == Formulation::primal ? sign_pow(d.p) : sign_pow((d.p - 1) * (d.q - 1));
  return s * select_rows(select_cols(Psi, cols), rows);
}

}  // namespace

SystemBlocks build_primal_hybrid(int p, const Mesh& mesh, const BoundaryPartition& bp, const Weights& w, int threads) {
  Degrees d = make_degrees(Formulation::primal, p);
  if (p < 2) throw std::invalid_argument("primal hybrid needs p >= 2");
  SystemBlocks s = hybrid_skeleton(d, mesh, bp);
  const int kt = d.trace();
  auto A = assemble_broken(d.alpha(), mesh, w.alpha, threads);
  auto B = assemble_broken(d.beta(), mesh, w.beta, threads);
  const double sg = sign_pow(p);
  SpMat O = diag(outer_signs(kt, mesh));
  const SpMat& Mf = B.Mf->mat;
  const SpMat& T = B.T->mat;
  const SpMat& D = B.D->mat;
  SpMat Mhat = O * Mf * O;
  SpMat XiT = SpMat(assemble_jump(kt, mesh, Orientation::outer).mat.transpose());

  const int N = s.nl_total();
  Triplets e, j;
  place(e, A.M.mat, s.off_alpha(), s.off_alpha());
  place(e, B.M.mat, s.off_beta(), s.off_beta());
  s.E = from(e, N, N);

  SpMat TMO = SpMat(T.transpose()) * Mf * O;
  place(j, D, s.off_alpha(), s.off_beta(), sg);
  place(j, SpMat(D.transpose()), s.off_beta(), s.off_alpha(), -sg);
  place(j, TMO, s.off_beta(), s.off_lambda(), sg);
  place(j, SpMat(TMO.transpose()), s.off_lambda(), s.off_beta(), -sg);
  s.J = from(j, N, N);

  Triplets c, bl;
  place(c, SpMat(Mhat * select_cols(XiT, s.g_entities)), s.off_lambda(), 0, sg);
  s.C = from(c, N, s.ng());
  place(bl, SpMat(Mhat * select_cols(XiT, s.ul_entities)), s.off_lambda(), 0);
  s.Bl = from(bl, N, int(s.ul_entities.size()));
  s.Bg = natural_pairing(d, mesh, bp, s.g_entities, s.ug_entities);
  return s;
}

SystemBlocks build_dual_hybrid(int q, const Mesh& mesh, const BoundaryPartition& bp, const Weights& w, int threads) {
  Degrees d = make_degrees(Formulation::dual, 4 - q);
  if (q > 2 || q < 1) throw std::invalid_argument("dual hybrid needs q in 1..2");
  SystemBlocks s = hybrid_skeleton(d, mesh, bp);
  const int kt = d.trace();
  auto A = assemble_broken(d.alpha(), mesh, w.alpha, threads);
  auto B = assemble_broken(d.beta(), mesh, w.beta, threads);
  const SpMat& Mf = A.Mf->mat;
  const SpMat& T = A.T->mat;
  const SpMat& D = A.D->mat;
  SpMat XiT = SpMat(assemble_jump(kt, mesh, Orientation::inner).mat.transpose());

  const int N = s.nl_total();
  Triplets e, j;
  place(e, A.M.mat, s.off_alpha(), s.off_alpha());
  place(e, B.M.mat, s.off_beta(), s.off_beta());
  s.E = from(e, N, N);

  SpMat TM = SpMat(T.transpose()) * Mf;
  place(j, SpMat(D.transpose()), s.off_alpha(), s.off_beta());
  place(j, D, s.off_beta(), s.off_alpha(), -1);
  place(j, TM, s.off_alpha(), s.off_lambda(), -1);
  place(j, SpMat(TM.transpose()), s.off_lambda(), s.off_alpha());
  s.J = from(j, N, N);

  Triplets c, bl;
  place(c, SpMat(Mf * select_cols(XiT, s.g_entities)), s.off_lambda(), 0, -1);
  s.C = from(c, N, s.ng());
  place(bl, SpMat(Mf * select_cols(XiT, s.ul_entities)), s.off_lambda(), 0, -1);
  s.Bl = from(bl, N, int(s.ul_entities.size()));
  s.Bg = natural_pairing(d, mesh, bp, s.g_entities, s.ug_entities);
  return s;
}

SystemBlocks build_hybrid(Formulation f, int p, const Mesh& mesh, const BoundaryPartition& bp, const Weights& w, int threads) {
  return f == Formulation::primal ? build_primal_hybrid(p, mesh, bp, w, threads) : build_dual_hybrid(4 - p, mesh, bp, w, threads);
}

MixedSystem build_mixed_reference(Formulation f, int p, const Mesh& mesh, const BoundaryPartition& bp, const Weights& w) {
  Degrees d = make_degrees(f, p);
  MixedSystem m;
  m.deg = d;
  const bool primal = f == Formulation::primal;
  m.alpha_conforming = !primal;
  auto A = assemble_broken(d.alpha(), mesh, w.alpha);
  auto B = assemble_broken(d.beta(), mesh, w.beta);
  const int kc = d.trace();  // degree of the conforming variable
  m.G = assemble_conforming_map(kc, mesh).mat;
  const int nconf = int(m.G.cols());
  m.na = primal ? int(A.M.mat.rows()) : nconf;
  m.nb = primal ? nconf : int(B.M.mat.rows());
  m.ul_entities = essential_entities(d.ul_degree(), mesh, bp, d.essential());
  m.ug_entities = closure_entities(d.ug_degree(), mesh, d.natural() == 1 ? bp.gamma1_faces : bp.gamma2_faces);

  const int N = m.dim();
  Triplets e, j, bg;
  std::vector<int> all(nconf);
  for (int i = 0; i < nconf; ++i) all[i] = i;
  if (primal) {
    const double sg = sign_pow(p);
    SpMat DG = B.D->mat * m.G;
    place(e, A.M.mat, 0, 0);
    place(e, SpMat(m.G.transpose() * B.M.mat * m.G), m.na, m.na);
    place(j, DG, 0, m.na, sg);
    place(j, SpMat(DG.transpose()), m.na, 0, -sg);
    // natural input: test rows are canonical, boundary 2-form traces outward
    SpMat Psi = natural_pairing(d, mesh, bp, all, m.ug_entities);
    place(bg, SpMat(diag(outer_entity_signs(kc, mesh)) * Psi), m.na, 0);
  } else {
    SpMat DG = A.D->mat * m.G;
    place(e, SpMat(m.G.transpose() * A.M.mat * m.G), 0, 0);
    place(e, B.M.mat, m.na, m.na);
    place(j, SpMat(DG.transpose()), 0, m.na);
    place(j, DG, m.na, 0, -1);
    place(bg, natural_pairing(d, mesh, bp, all, m.ug_entities), 0, 0);
  }
  m.E = from(e, N, N);
  m.J = from(j, N, N);
  m.Bg = from(bg, N, int(m.ug_entities.size()));

  // essential DOFs of the conforming variable follow the input:
  // primal (-1)^p tr beta = u2 (outer orientation on boundary faces), dual tr alpha = u1
  const int off = primal ? m.na : 0;
  Eigen::VectorXd rho = outer_entity_signs(kc, mesh);
  Triplets r;
  for (std::size_t i = 0; i < m.ul_entities.size(); ++i) {
    int ent = m.ul_entities[i];
    m.essential.push_back(off + ent);
    r.emplace_back(int(i), int(i), primal ? sign_pow(p) * rho[ent] : 1.0);
  }
  m.Ress = from(r, int(m.ul_entities.size()), int(m.ul_entities.size()));
  return m;
}

Eigen::MatrixXd CellPHDAE::G_face(int lf) const {
  Eigen::MatrixXd R(G.rows(), face_dofs[lf].size());
  for (std::size_t i = 0; i < face_dofs[lf].size(); ++i) R.col(i) = G.col(face_dofs[lf][i]);
  return R;
}

Eigen::MatrixXd CellPHDAE::B_face(int lf) const {
  Eigen::MatrixXd R(B.rows(), face_dofs[lf].size());
  for (std::size_t i = 0; i < face_dofs[lf].size(); ++i) R.col(i) = B.col(face_dofs[lf][i]);
  return R;
}

CellPHDAE build_cell_phdae(Formulation f, int p, const Mesh& mesh, int t, const Weights& w) {
  CellPHDAE c;
  c.deg = make_degrees(f, p);
  const Degrees& d = c.deg;
  CellGeometry g = cell_geometry(mesh, t);
  const int Na = num_local_dofs(d.alpha()), Nb = num_local_dofs(d.beta()), kt = d.trace(), Nl = num_local_dofs(kt);
  c.M = Eigen::MatrixXd::Zero(Na + Nb, Na + Nb);
  c.M.topLeftCorner(Na, Na) = local_mass(d.alpha(), g, w.alpha);
  c.M.bottomRightCorner(Nb, Nb) = local_mass(d.beta(), g, w.beta);
  c.J = Eigen::MatrixXd::Zero(Na + Nb, Na + Nb);
  c.G = Eigen::MatrixXd::Zero(Na + Nb, Nl);
  Eigen::MatrixXd Mf = local_facet_mass(kt, g);
  Eigen::MatrixXd T = local_trace(kt);
  if (f == Formulation::primal) {
    const double sg = sign_pow(p);
    Eigen::MatrixXd D = local_derivative(d.beta(), g).D;
    c.J.topRightCorner(Na, Nb) = sg * D;
    c.J.bottomLeftCorner(Nb, Na) = -sg * D.transpose();
    Eigen::VectorXd o = Eigen::VectorXd::Ones(Nl);
    if (kt == 2)
      for (int i = 0; i < 4; ++i) o[i] = mesh.face_outward[t][i];
    c.G.bottomRows(Nb) = sg * T.transpose() * Mf * o.asDiagonal();
    c.B = sg * o.asDiagonal() * Mf * o.asDiagonal();
  } else {
    Eigen::MatrixXd D = local_derivative(d.alpha(), g).D;
    c.J.topRightCorner(Na, Nb) = D.transpose();
    c.J.bottomLeftCorner(Nb, Na) = -D;
    c.G.topRows(Na) = -T.transpose() * Mf;
    c.B = -Mf;
  }
  for (int lf = 0; lf < 4; ++lf) c.face_dofs[lf] = face_dofs(kt, lf);
  return c;
}

SystemBlocks interconnect(const std::vector<CellPHDAE>& cells, const Mesh& mesh, const BoundaryPartition& bp) {
  if (cells.empty() || int(cells.size()) != mesh.num_cells()) throw std::invalid_argument("interconnect: one pHDAE per cell");
  const Degrees d = cells.front().deg;
  for (const auto& c : cells)
    if (c.deg.form != d.form || c.deg.p != d.p) throw std::invalid_argument("interconnect: mixed formulations");
  SystemBlocks s = hybrid_skeleton(d, mesh, bp);
  const bool primal = d.form == Formulation::primal;
  const int kt = d.trace();
  const int Na = num_local_dofs(d.alpha()), Nb = num_local_dofs(d.beta()), Nl = num_local_dofs(kt);
  const int N = s.nl_total();

  std::vector<int> gpos(mesh.num_entities(kt), -1), upos(mesh.num_entities(kt), -1);
  for (int i = 0; i < s.ng(); ++i) gpos[s.g_entities[i]] = i;
  for (std::size_t i = 0; i < s.ul_entities.size(); ++i) upos[s.ul_entities[i]] = int(i);
  Eigen::VectorXd rho = outer_entity_signs(kt, mesh);
  // essential port value: primal ports carry tr beta = (-1)^p u2, dual ports carry u1
  const double ess = primal ? sign_pow(d.p) : 1.0;

  Triplets e, j, c, bl;
  for (int t = 0; t < mesh.num_cells(); ++t) {
    const CellPHDAE& cp = cells[t];
    std::vector<int> xs = range(s.off_alpha() + t * Na, Na), xl = range(s.off_lambda() + t * Nl, Nl);
    auto xb = range(s.off_beta() + t * Nb, Nb);
    xs.insert(xs.end(), xb.begin(), xb.end());
    place(e, cp.M, xs, xs);
    place(j, cp.J, xs, xs);
    place(j, cp.G, xs, xl);
    place(j, Eigen::MatrixXd(-cp.G.transpose()), xl, xs);
    // transformer: port i of cell t = ratio * shared trace variable
    for (int i = 0; i < Nl; ++i) {
      int ent = cell_entity(mesh, kt, t, i);
      double ratio = cell_entity_sign(mesh, kt, t, i);
      if (primal && kt == 2) ratio *= mesh.face_outward[t][i] * rho[ent];
      for (int r = 0; r < Nl; ++r) {
        double v = cp.B(r, i) * ratio;
        if (v == 0.0) continue;
        if (gpos[ent] >= 0) c.emplace_back(xl[r], gpos[ent], v);
        else if (upos[ent] >= 0) bl.emplace_back(xl[r], upos[ent], ess * v);
      }
    }
  }
  s.E = from(e, N, N);
  s.J = from(j, N, N);
  s.C = from(c, N, s.ng());
  s.Bl = from(bl, N, int(s.ul_entities.size()));
  s.Bg = natural_pairing(d, mesh, bp, s.g_entities, s.ug_entities);
  return s;
}

DofCount dof_count(Formulation f, int p, long long n) {
  check_p(p);
  auto cnt = structured_box_counts(n);
  const long long C = cnt[3];
  Degrees d = make_degrees(f, p);
  DofCount r;
  r.hybrid = cnt[d.trace()];
  const int kb = f == Formulation::primal ? d.alpha() : d.beta();
  r.mixed = r.hybrid + C * num_local_dofs(kb);
  return r;
}

}  // namespace dfh
