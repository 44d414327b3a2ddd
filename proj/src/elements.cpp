#include "dfh/elements.hpp"

#include <cmath>
#include <stdexcept>

namespace dfh {

namespace {

LineQuadrature gauss(int n) {
  LineQuadrature q;
  if (n == 3) {
    double a = std::sqrt(0.6) / 2;
    q.s = {0.5 - a, 0.5, 0.5 + a};
    q.weight = {5.0 / 18, 8.0 / 18, 5.0 / 18};
  } else if (n == 4) {
    double r = 2.0 / 7 * std::sqrt(6.0 / 5);
    double a = std::sqrt(3.0 / 7 - r) / 2, b = std::sqrt(3.0 / 7 + r) / 2;
    double wa = (18 + std::sqrt(30.0)) / 72, wb = (18 - std::sqrt(30.0)) / 72;
    q.s = {0.5 - b, 0.5 - a, 0.5 + a, 0.5 + b};
    q.weight = {wb, wa, wa, wb};
  } else {
    throw std::invalid_argument("gauss: unsupported point count");
  }
  return q;
}

// collapsed tensor rules; exact for total degree 4 in x,y(,z)
TetQuadrature build_tet() {
  TetQuadrature r;
  r.order = 4;
  auto gu = gauss(4), gv = gauss(3), gw = gauss(3);
  for (std::size_t i = 0; i < gu.s.size(); ++i)
    for (std::size_t j = 0; j < gv.s.size(); ++j)
      for (std::size_t k = 0; k < gw.s.size(); ++k) {
        double u = gu.s[i], v = gv.s[j], w = gw.s[k];
        double x = u, y = v * (1 - u), z = w * (1 - u) * (1 - v);
        r.bary.emplace_back(1 - x - y - z, x, y, z);
        r.weight.push_back(gu.weight[i] * gv.weight[j] * gw.weight[k] * (1 - u) * (1 - u) * (1 - v));
      }
  return r;
}

TriQuadrature build_tri() {
  TriQuadrature r;
  r.order = 4;
  auto g = gauss(3);
  for (std::size_t i = 0; i < g.s.size(); ++i)
    for (std::size_t j = 0; j < g.s.size(); ++j) {
      double u = g.s[i], v = g.s[j];
      double x = u, y = v * (1 - u);
      r.bary.emplace_back(1 - x - y, x, y);
      r.weight.push_back(g.weight[i] * g.weight[j] * (1 - u));
    }
  return r;
}

void check_k(int k, int hi) {
  if (k < 0 || k > hi) throw std::invalid_argument("form degree out of range");
}

}  // namespace

const TetQuadrature& tet_rule() {
  static const TetQuadrature r = build_tet();
  return r;
}
const TriQuadrature& tri_rule() {
  static const TriQuadrature r = build_tri();
  return r;
}
const LineQuadrature& line_rule() {
  static const LineQuadrature r = gauss(4);
  return r;
}

Vec3 CellGeometry::point(const Eigen::Vector4d& b) const { return b[0] * x[0] + b[1] * x[1] + b[2] * x[2] + b[3] * x[3]; }

Vec3 CellGeometry::face_normal(int lf) const {
  const auto& f = kLocalFaces[lf];
  return (x[f[1]] - x[f[0]]).cross(x[f[2]] - x[f[0]]).normalized();
}

double CellGeometry::face_area(int lf) const {
  const auto& f = kLocalFaces[lf];
  return 0.5 * (x[f[1]] - x[f[0]]).cross(x[f[2]] - x[f[0]]).norm();
}

int CellGeometry::face_outward(int lf) const {
  // boundary of [0123] carries (-1)^(opposite vertex); flipped for negative cells
  int eps = (lf % 2 == 1) ? 1 : -1;
  return orientation * eps;
}

Eigen::Vector4d CellGeometry::face_point(int lf, const Eigen::Vector3d& tb) const {
  Eigen::Vector4d b = Eigen::Vector4d::Zero();
  const auto& f = kLocalFaces[lf];
  for (int i = 0; i < 3; ++i) b[f[i]] = tb[i];
  return b;
}

CellGeometry make_geometry(const std::array<Vec3, 4>& x) {
  CellGeometry g;
  g.x = x;
  Eigen::Matrix3d J;
  for (int i = 0; i < 3; ++i) J.col(i) = x[i + 1] - x[0];
  double det = J.determinant();
  if (!(std::abs(det) > 0)) throw std::invalid_argument("degenerate cell");
  g.orientation = det > 0 ? 1 : -1;
  g.volume = std::abs(det) / 6;
  Eigen::Matrix3d Jinv = J.inverse();  // rows: grad lambda_1..3
  for (int i = 0; i < 3; ++i) g.grad.row(i + 1) = Jinv.row(i);
  g.grad.row(0) = -(g.grad.row(1) + g.grad.row(2) + g.grad.row(3));
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) g.diameter = std::max(g.diameter, (x[a] - x[b]).norm());
  return g;
}

CellGeometry cell_geometry(const Mesh& mesh, int t) {
  const auto& c = mesh.cells[t];
  return make_geometry({mesh.vertices[c[0]], mesh.vertices[c[1]], mesh.vertices[c[2]], mesh.vertices[c[3]]});
}

Eigen::MatrixXd eval_basis(int k, const CellGeometry& g, const Eigen::Vector4d& l) {
  check_k(k, 3);
  Eigen::MatrixXd B(num_local_dofs(k), proxy_components(k));
  auto G = [&](int i) -> Vec3 { return g.grad.row(i).transpose(); };
  switch (k) {
    case 0:
      B = l;
      break;
    case 1:
      for (int e = 0; e < 6; ++e) {
        int i = kLocalEdges[e][0], j = kLocalEdges[e][1];
        B.row(e) = (l[i] * G(j) - l[j] * G(i)).transpose();
      }
      break;
    case 2:
      for (int f = 0; f < 4; ++f) {
        int i = kLocalFaces[f][0], j = kLocalFaces[f][1], m = kLocalFaces[f][2];
        Vec3 v = 2 * (l[i] * G(j).cross(G(m)) - l[j] * G(i).cross(G(m)) + l[m] * G(i).cross(G(j)));
        B.row(f) = v.transpose();
      }
      break;
    case 3:
      B(0, 0) = 1.0 / g.volume;
      break;
  }
  return B;
}

Eigen::MatrixXd eval_dbasis(int k, const CellGeometry& g, const Eigen::Vector4d&) {
  check_k(k, 2);
  auto G = [&](int i) -> Vec3 { return g.grad.row(i).transpose(); };
  Eigen::MatrixXd B(num_local_dofs(k), proxy_components(k + 1));
  switch (k) {
    case 0:
      B = g.grad;
      break;
    case 1:
      for (int e = 0; e < 6; ++e) {
        int i = kLocalEdges[e][0], j = kLocalEdges[e][1];
        B.row(e) = (2 * G(i).cross(G(j))).transpose();
      }
      break;
    case 2:
      for (int f = 0; f < 4; ++f) {
        int i = kLocalFaces[f][0], j = kLocalFaces[f][1], m = kLocalFaces[f][2];
        B(f, 0) = 6 * G(i).dot(G(j).cross(G(m)));
      }
      break;
  }
  return B;
}

Eigen::MatrixXi incidence(int k, int orientation) {
  check_k(k, 2);
  Eigen::MatrixXi d = Eigen::MatrixXi::Zero(num_local_dofs(k + 1), num_local_dofs(k));
  switch (k) {
    case 0:
      for (int e = 0; e < 6; ++e) {
        d(e, kLocalEdges[e][0]) = -1;
        d(e, kLocalEdges[e][1]) = 1;
      }
      break;
    case 1:
      for (int f = 0; f < 4; ++f) {
        d(f, kFaceEdges[f][0]) = 1;
        d(f, kFaceEdges[f][1]) = -1;
        d(f, kFaceEdges[f][2]) = 1;
      }
      break;
    case 2:
      for (int f = 0; f < 4; ++f) d(0, f) = orientation * ((f % 2 == 1) ? 1 : -1);
      break;
  }
  return d;
}

Eigen::MatrixXd local_mass(int k, const CellGeometry& g, double weight) {
  check_k(k, 3);
  if (!(weight > 0)) throw std::invalid_argument("local_mass: weight must be positive");
  const int N = num_local_dofs(k);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  const auto& q = tet_rule();
  for (std::size_t p = 0; p < q.weight.size(); ++p) {
    Eigen::MatrixXd B = eval_basis(k, g, q.bary[p]);
    M.noalias() += (q.weight[p] * 6 * g.volume * weight) * B * B.transpose();
  }
  return 0.5 * (M + M.transpose());
}

LocalDerivative local_derivative(int k, const CellGeometry& g, double weight) {
  check_k(k, 2);
  LocalDerivative r;
  r.d = incidence(k, g.orientation);
  r.D = local_mass(k + 1, g, weight) * r.d.cast<double>();
  return r;
}

Eigen::MatrixXd local_derivative_quadrature(int k, const CellGeometry& g, double weight) {
  check_k(k, 2);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(num_local_dofs(k + 1), num_local_dofs(k));
  const auto& q = tet_rule();
  for (std::size_t p = 0; p < q.weight.size(); ++p) {
    Eigen::MatrixXd B = eval_basis(k + 1, g, q.bary[p]);
    Eigen::MatrixXd dB = eval_dbasis(k, g, q.bary[p]);
    D.noalias() += (q.weight[p] * 6 * g.volume * weight) * B * dB.transpose();
  }
  return D;
}

std::vector<int> face_dofs(int k, int lf) {
  check_k(k, 2);
  switch (k) {
    case 0: return {kLocalFaces[lf][0], kLocalFaces[lf][1], kLocalFaces[lf][2]};
    case 1: return {kFaceEdges[lf][0], kFaceEdges[lf][1], kFaceEdges[lf][2]};
    default: return {lf};
  }
}

Eigen::MatrixXd local_trace(int k) {
  check_k(k, 2);
  return Eigen::MatrixXd::Identity(num_local_dofs(k), num_local_dofs(k));
}

Eigen::MatrixXd local_trace(int k, int lf) {
  auto dofs = face_dofs(k, lf);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dofs.size(), num_local_dofs(k));
  for (std::size_t i = 0; i < dofs.size(); ++i) T(i, dofs[i]) = 1;
  return T;
}

Eigen::MatrixXd eval_trace(int k, const CellGeometry& g, int lf, const Eigen::Vector4d& bary) {
  check_k(k, 2);
  Eigen::MatrixXd B = eval_basis(k, g, bary);
  if (k == 0) return B;
  Vec3 n = g.face_normal(lf);
  if (k == 2) return B * n;
  Eigen::MatrixXd T = B;
  for (int i = 0; i < T.rows(); ++i) T.row(i) -= (B.row(i).dot(n.transpose())) * n.transpose();
  return T;
}

Eigen::MatrixXd local_facet_mass(int k, const CellGeometry& g, const std::vector<int>& faces) {
  check_k(k, 2);
  const int N = num_local_dofs(k);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  const auto& q = tri_rule();
  for (int lf : faces) {
    double A = g.face_area(lf);
    for (std::size_t p = 0; p < q.weight.size(); ++p) {
      Eigen::MatrixXd T = eval_trace(k, g, lf, g.face_point(lf, q.bary[p]));
      M.noalias() += (q.weight[p] * 2 * A) * T * T.transpose();
    }
  }
  return 0.5 * (M + M.transpose());
}

Eigen::MatrixXd local_facet_mass(int k, const CellGeometry& g) { return local_facet_mass(k, g, {0, 1, 2, 3}); }

}  // namespace dfh
