#include "dfh/assembly.hpp"
#include "dfh/parallel.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <stdexcept>

namespace dfh {

namespace {

FormSpace blocked(int k, const Mesh& mesh, Layout l, Orientation o) {
  FormSpace s;
  s.k = k;
  s.layout = l;
  s.orientation = o;
  const int N = num_local_dofs(k);
  s.dim = mesh.num_cells() * N;
  s.cell_dofs.resize(mesh.num_cells());
  for (int t = 0; t < mesh.num_cells(); ++t)
    for (int i = 0; i < N; ++i) s.cell_dofs[t].push_back(t * N + i);
  return s;
}

// dense per-cell blocks placed on the diagonal, merged in cell order
SpMat block_diagonal(const std::vector<Eigen::MatrixXd>& blocks, int rows_per, int cols_per) {
  const int C = int(blocks.size());
  Triplets trip;
  trip.reserve(std::size_t(C) * rows_per * cols_per);
  for (int t = 0; t < C; ++t)
    for (int j = 0; j < cols_per; ++j)
      for (int i = 0; i < rows_per; ++i)
        if (blocks[t](i, j) != 0.0) trip.emplace_back(t * rows_per + i, t * cols_per + j, blocks[t](i, j));
  SpMat A(C * rows_per, C * cols_per);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

}  // namespace

FormSpace broken_space(int k, const Mesh& mesh, Orientation o) { return blocked(k, mesh, Layout::broken, o); }

FormSpace facet_broken_space(int k, const Mesh& mesh, Orientation o) {
  if (k > 2) throw std::invalid_argument("facet spaces need k <= 2");
  return blocked(k, mesh, Layout::facet_broken, o);
}

FormSpace conforming_space(int k, const Mesh& mesh, Orientation o) {
  FormSpace s;
  s.k = k;
  s.layout = Layout::conforming;
  s.orientation = o;
  s.dim = mesh.num_entities(k);
  const int N = num_local_dofs(k);
  s.cell_dofs.resize(mesh.num_cells());
  s.cell_signs.resize(mesh.num_cells());
  for (int t = 0; t < mesh.num_cells(); ++t)
    for (int i = 0; i < N; ++i) {
      s.cell_dofs[t].push_back(cell_entity(mesh, k, t, i));
      s.cell_signs[t].push_back(cell_entity_sign(mesh, k, t, i));
    }
  return s;
}

FormSpace facet_unbroken_space(int k, const Mesh& mesh, Orientation o) {
  if (k > 2) throw std::invalid_argument("facet spaces need k <= 2");
  FormSpace s = conforming_space(k, mesh, o);
  s.layout = Layout::facet_unbroken;
  return s;
}

int cell_entity(const Mesh& mesh, int k, int t, int i) {
  switch (k) {
    case 0: return mesh.cells[t][i];
    case 1: return mesh.cell_edges[t][i];
    case 2: return mesh.cell_faces[t][i];
    case 3: return t;
  }
  throw std::invalid_argument("cell_entity: bad degree");
}

int cell_entity_sign(const Mesh& mesh, int k, int t, int i) {
  switch (k) {
    case 0: return 1;
    case 1: return mesh.cell_edge_sign[t][i];
    case 2: return mesh.cell_face_sign[t][i];
    case 3: return 1;
  }
  throw std::invalid_argument("cell_entity_sign: bad degree");
}

BrokenOperators assemble_broken(int k, const Mesh& mesh, double weight, int threads) {
  return assemble_broken(k, mesh, std::vector<double>(mesh.num_cells(), weight), threads);
}

BrokenOperators assemble_broken(int k, const Mesh& mesh, const std::vector<double>& w, int threads) {
  if (k < 0 || k > 3) throw std::invalid_argument("assemble_broken: bad degree");
  const int C = mesh.num_cells();
  const int N = num_local_dofs(k);
  std::vector<Eigen::MatrixXd> M(C), D, F;
  if (k <= 2) {
    D.resize(C);
    F.resize(C);
  }
  parallel_for(C, threads, [&](int t) {
    CellGeometry g = cell_geometry(mesh, t);
    M[t] = local_mass(k, g, w[t]);
    if (k <= 2) {
      D[t] = local_derivative(k, g).D;
      F[t] = local_facet_mass(k, g);
    }
  });
  BrokenOperators ops;
  ops.M = {block_diagonal(M, N, N), broken_space(k, mesh), broken_space(k, mesh)};
  if (k <= 2) {
    const int N1 = num_local_dofs(k + 1);
    ops.D = OperatorMatrix{block_diagonal(D, N1, N), broken_space(k + 1, mesh), broken_space(k, mesh)};
    std::vector<Eigen::MatrixXd> T(C, local_trace(k));
    ops.T = OperatorMatrix{block_diagonal(T, N, N), facet_broken_space(k, mesh), broken_space(k, mesh)};
    ops.Mf = OperatorMatrix{block_diagonal(F, N, N), facet_broken_space(k, mesh), facet_broken_space(k, mesh)};
  }
  return ops;
}

OperatorMatrix assemble_conforming_map(int k, const Mesh& mesh) {
  FormSpace cs = conforming_space(k, mesh);
  FormSpace bs = broken_space(k, mesh);
  Triplets trip;
  for (int t = 0; t < mesh.num_cells(); ++t)
    for (std::size_t i = 0; i < cs.cell_dofs[t].size(); ++i)
      trip.emplace_back(bs.cell_dofs[t][i], cs.cell_dofs[t][i], cs.cell_signs[t][i]);
  SpMat G(bs.dim, cs.dim);
  G.setFromTriplets(trip.begin(), trip.end());
  return {G, bs, cs};
}

Eigen::VectorXd outer_signs(int k, const Mesh& mesh) {
  const int N = num_local_dofs(k);
  Eigen::VectorXd o = Eigen::VectorXd::Ones(mesh.num_cells() * N);
  if (k == 2)
    for (int t = 0; t < mesh.num_cells(); ++t)
      for (int i = 0; i < 4; ++i) o[t * 4 + i] = mesh.face_outward[t][i];
  return o;
}

Eigen::VectorXd outer_entity_signs(int k, const Mesh& mesh) {
  Eigen::VectorXd r = Eigen::VectorXd::Ones(mesh.num_entities(k));
  if (k == 2)
    for (int f = 0; f < mesh.num_faces(); ++f)
      if (mesh.is_boundary_face(f)) r[f] = mesh.boundary_face_sign(f);
  return r;
}

OperatorMatrix assemble_jump(int k, const Mesh& mesh, Orientation o) {
  if (k < 0 || k > 2) throw std::invalid_argument("assemble_jump: bad degree");
  const int N = num_local_dofs(k);
  Eigen::VectorXd rho = outer_entity_signs(k, mesh);
  Triplets trip;
  for (int t = 0; t < mesh.num_cells(); ++t)
    for (int i = 0; i < N; ++i) {
      int e = cell_entity(mesh, k, t, i);
      double s = cell_entity_sign(mesh, k, t, i);
      if (o == Orientation::outer && k == 2) s *= mesh.face_outward[t][i] * rho[e];
      trip.emplace_back(e, t * N + i, s);
    }
  SpMat X(mesh.num_entities(k), mesh.num_cells() * N);
  X.setFromTriplets(trip.begin(), trip.end());
  return {X, facet_unbroken_space(k, mesh, o), facet_broken_space(k, mesh, o)};
}

OperatorMatrix assemble_jump(int k, const Mesh& mesh, Orientation o, const std::vector<int>& faces) {
  OperatorMatrix J = assemble_jump(k, mesh, o);
  Eigen::VectorXd keep = Eigen::VectorXd::Zero(mesh.num_entities(k));
  for (int e : closure_entities(k, mesh, faces)) keep[e] = 1;
  J.mat = diag(keep) * J.mat;
  J.mat.prune(0.0);
  return J;
}

std::vector<int> closure_entities(int k, const Mesh& mesh, const std::vector<int>& faces) {
  std::set<int> s;
  for (int f : faces) {
    if (k == 2) s.insert(f);
    else if (k == 1) s.insert(mesh.face_edges[f].begin(), mesh.face_edges[f].end());
    else if (k == 0) s.insert(mesh.faces[f].begin(), mesh.faces[f].end());
    else throw std::invalid_argument("closure_entities: bad degree");
  }
  return {s.begin(), s.end()};
}

OperatorMatrix assemble_boundary_pairing(int kt, int kc, const Mesh& mesh, const std::vector<int>& faces) {
  if (kt < 0 || kc < 0 || kt + kc != 2) throw std::invalid_argument("boundary pairing needs k_test + k_ctrl = 2");
  const auto& q = tri_rule();
  Triplets trip;
  for (int f : faces) {
    if (!mesh.is_boundary_face(f)) throw std::invalid_argument("boundary pairing on an interior face");
    const auto& a = mesh.adjacency[f];
    int t = a.plus, lf = a.plus_local;
    CellGeometry g = cell_geometry(mesh, t);
    // 2-form DOFs on boundary faces are outward oriented, so their canonical
    // trace proxy already measures against n_out
    Vec3 nout = mesh.face_outward[t][lf] * g.face_normal(lf);
    auto dt = face_dofs(kt, lf), dc = face_dofs(kc, lf);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(dt.size(), dc.size());
    for (std::size_t p = 0; p < q.weight.size(); ++p) {
      Eigen::Vector4d b = g.face_point(lf, q.bary[p]);
      Eigen::MatrixXd A = eval_trace(kt, g, lf, b), B = eval_trace(kc, g, lf, b);
      double w = q.weight[p] * 2 * g.face_area(lf);
      for (std::size_t i = 0; i < dt.size(); ++i)
        for (std::size_t j = 0; j < dc.size(); ++j) {
          double v;
          if (kt == 1) {
            Vec3 x = A.row(dt[i]).transpose(), y = B.row(dc[j]).transpose();
            v = x.cross(y).dot(nout);
          } else {
            v = A(dt[i], 0) * B(dc[j], 0);
          }
          P(i, j) += w * v;
        }
    }
    for (std::size_t i = 0; i < dt.size(); ++i)
      for (std::size_t j = 0; j < dc.size(); ++j)
        trip.emplace_back(cell_entity(mesh, kt, t, dt[i]), cell_entity(mesh, kc, t, dc[j]),
                          P(i, j) * cell_entity_sign(mesh, kt, t, dt[i]) * cell_entity_sign(mesh, kc, t, dc[j]));
  }
  SpMat Psi(mesh.num_entities(kt), mesh.num_entities(kc));
  Psi.setFromTriplets(trip.begin(), trip.end());
  return {Psi, facet_unbroken_space(kt, mesh), facet_unbroken_space(kc, mesh)};
}

SpMat select_rows(const SpMat& A, const std::vector<int>& rows) {
  SpMat P(rows.size(), A.rows());
  Triplets trip;
  for (std::size_t i = 0; i < rows.size(); ++i) trip.emplace_back(int(i), rows[i], 1.0);
  P.setFromTriplets(trip.begin(), trip.end());
  return P * A;
}

SpMat select_cols(const SpMat& A, const std::vector<int>& cols) {
  SpMat P(A.cols(), cols.size());
  Triplets trip;
  for (std::size_t i = 0; i < cols.size(); ++i) trip.emplace_back(cols[i], int(i), 1.0);
  P.setFromTriplets(trip.begin(), trip.end());
  return A * P;
}

SpMat diag(const Eigen::VectorXd& d) {
  SpMat D(d.size(), d.size());
  Triplets trip;
  for (int i = 0; i < d.size(); ++i)
    if (d[i] != 0.0) trip.emplace_back(i, i, d[i]);
  D.setFromTriplets(trip.begin(), trip.end());
  return D;
}

void write_coo(const std::string& path, const SpMat& A) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "# " << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n" << std::setprecision(17);
  for (int j = 0; j < A.outerSize(); ++j)
    for (SpMat::InnerIterator it(A, j); it; ++it) os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

}  // namespace dfh
