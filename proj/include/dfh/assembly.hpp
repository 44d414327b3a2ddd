#pragma once

#include "dfh/elements.hpp"
#include "dfh/mesh.hpp"

#include <Eigen/Sparse>
#include <optional>
#include <string>
#include <vector>

namespace dfh {

using SpMat = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

enum class Layout { conforming, broken, facet_broken, facet_unbroken };
enum class Orientation { inner, outer };

struct FormSpace {
  int k = 0;
  int s = 1;
  Layout layout = Layout::broken;
  Orientation orientation = Orientation::inner;
  int dim = 0;
  // broken layouts: contiguous block t*N..t*N+N-1; conforming layouts:
  // global entity id of each local DOF
  std::vector<std::vector<int>> cell_dofs;
  // conforming only: sign of each local DOF against the global orientation
  std::vector<std::vector<int>> cell_signs;
};

FormSpace broken_space(int k, const Mesh& mesh, Orientation o = Orientation::inner);
FormSpace facet_broken_space(int k, const Mesh& mesh, Orientation o = Orientation::inner);
FormSpace conforming_space(int k, const Mesh& mesh, Orientation o = Orientation::inner);
FormSpace facet_unbroken_space(int k, const Mesh& mesh, Orientation o = Orientation::inner);

struct OperatorMatrix {
  SpMat mat;
  FormSpace row, col;
};

// global entity of local DOF i (degree k) of cell t, and its parity sign
int cell_entity(const Mesh& mesh, int k, int t, int i);
int cell_entity_sign(const Mesh& mesh, int k, int t, int i);

struct BrokenOperators {
  OperatorMatrix M;                  // weighted mass
  std::optional<OperatorMatrix> D;   // unweighted M^{k+1} d, k <= 2
  std::optional<OperatorMatrix> T;   // trace selection, k <= 2
  std::optional<OperatorMatrix> Mf;  // facet mass over every cell boundary, k <= 2
};

BrokenOperators assemble_broken(int k, const Mesh& mesh, double weight = 1.0, int threads = 1);
BrokenOperators assemble_broken(int k, const Mesh& mesh, const std::vector<double>& cell_weight, int threads = 1);

OperatorMatrix assemble_conforming_map(int k, const Mesh& mesh);

// Sign of each broken facet DOF used by outer-oriented normal traces:
// the outward sign of the canonical face normal for k=2, +1 otherwise.
Eigen::VectorXd outer_signs(int k, const Mesh& mesh);
// Orientation of unbroken outer facet DOFs against the canonical one:
// boundary faces are oriented by the outward normal.
Eigen::VectorXd outer_entity_signs(int k, const Mesh& mesh);

// Rows: all entities of degree k (zero rows for entities off `faces` when a
// subset is given); columns: broken facet DOFs.
OperatorMatrix assemble_jump(int k, const Mesh& mesh, Orientation o);
OperatorMatrix assemble_jump(int k, const Mesh& mesh, Orientation o, const std::vector<int>& faces);

// Rows: entities of degree k_test, columns: entities of degree k_ctrl;
// the pairing is integrated over `faces` (boundary faces) against n_out.
OperatorMatrix assemble_boundary_pairing(int k_test, int k_ctrl, const Mesh& mesh, const std::vector<int>& faces);

// entity ids of degree k in the closure of the given faces, ascending
std::vector<int> closure_entities(int k, const Mesh& mesh, const std::vector<int>& faces);

// P A (keep `rows` in order), A P^T (keep `cols` in order)
SpMat select_rows(const SpMat& A, const std::vector<int>& rows);
SpMat select_cols(const SpMat& A, const std::vector<int>& cols);
SpMat diag(const Eigen::VectorXd& d);

void write_coo(const std::string& path, const SpMat& A);

}  // namespace dfh
