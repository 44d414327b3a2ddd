#pragma once

#include "dfh/mesh.hpp"

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace dfh {

// Lowest-order Whitney forms on tetrahedra, vector proxies:
//   k=0 vertex values, k=1 edge circulations, k=2 face fluxes (right-hand
//   normal of the ascending vertex triple), k=3 cell integrals.
// Bases are dual to these DOFs, so the 3-form basis is 1/V.

struct TetQuadrature {
  std::vector<Eigen::Vector4d> bary;
  std::vector<double> weight;  // sum 1/6
  int order = 0;
};

struct TriQuadrature {
  std::vector<Eigen::Vector3d> bary;
  std::vector<double> weight;  // sum 1/2
  int order = 0;
};

struct LineQuadrature {
  std::vector<double> s;
  std::vector<double> weight;  // sum 1
};

const TetQuadrature& tet_rule();
const TriQuadrature& tri_rule();
const LineQuadrature& line_rule();

struct CellGeometry {
  std::array<Vec3, 4> x;
  Eigen::Matrix<double, 4, 3> grad;  // rows: grad of barycentric coordinates
  double volume = 0;
  int orientation = 1;
  double diameter = 0;

  Vec3 point(const Eigen::Vector4d& b) const;
  Vec3 face_normal(int lf) const;  // unit, canonical right-hand
  double face_area(int lf) const;
  int face_outward(int lf) const;
  // barycentric coordinates in the cell of a point given on local face lf
  Eigen::Vector4d face_point(int lf, const Eigen::Vector3d& tri_bary) const;
};

CellGeometry make_geometry(const std::array<Vec3, 4>& x);
CellGeometry cell_geometry(const Mesh& mesh, int t);

constexpr int num_local_dofs(int k) { return k == 0 ? 4 : k == 1 ? 6 : k == 2 ? 4 : 1; }
constexpr int proxy_components(int k) { return (k == 1 || k == 2) ? 3 : 1; }

// N x components
Eigen::MatrixXd eval_basis(int k, const CellGeometry& g, const Eigen::Vector4d& bary);
// proxy of d applied to each basis function: grad (k=0), curl (k=1), div (k=2)
Eigen::MatrixXd eval_dbasis(int k, const CellGeometry& g, const Eigen::Vector4d& bary);

// local incidence d^k, N^{k+1} x N^k, entries in {-1,0,1}
Eigen::MatrixXi incidence(int k, int orientation = 1);

Eigen::MatrixXd local_mass(int k, const CellGeometry& g, double weight = 1.0);

struct LocalDerivative {
  Eigen::MatrixXi d;
  Eigen::MatrixXd D;  // M^{k+1} d
};
LocalDerivative local_derivative(int k, const CellGeometry& g, double weight = 1.0);
// the same pairing computed directly by quadrature
Eigen::MatrixXd local_derivative_quadrature(int k, const CellGeometry& g, double weight = 1.0);

// DOFs of degree k attached to sub-simplices of local face lf
std::vector<int> face_dofs(int k, int lf);
Eigen::MatrixXd local_trace(int k);
Eigen::MatrixXd local_trace(int k, int lf);

// trace proxies of all N^k basis functions on local face lf: scalar for k=0,
// tangential vector for k=1, normal component against the canonical face
// normal for k=2
Eigen::MatrixXd eval_trace(int k, const CellGeometry& g, int lf, const Eigen::Vector4d& bary);

Eigen::MatrixXd local_facet_mass(int k, const CellGeometry& g, const std::vector<int>& faces);
Eigen::MatrixXd local_facet_mass(int k, const CellGeometry& g);

}  // namespace dfh
