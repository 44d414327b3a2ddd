#pragma once

#include "dfh/assembly.hpp"

#include <vector>

namespace dfh {

enum class Formulation { primal, dual };

struct Weights {
  double alpha = 1.0;  // c^-2 (wave) or eps (Maxwell)
  double beta = 1.0;   // 1 (wave) or mu (Maxwell)
};

// Form degrees carried by one formulation of the (p, q) pair, p + q = 4.
struct Degrees {
  int p = 3, q = 1;
  Formulation form = Formulation::primal;
  int alpha() const { return form == Formulation::primal ? p : q - 1; }
  int beta() const { return form == Formulation::primal ? p - 1 : q; }
  int trace() const { return form == Formulation::primal ? p - 1 : q - 1; }
  // essential boundary partition and the degree of its input
  int essential() const { return form == Formulation::primal ? 2 : 1; }
  int natural() const { return 3 - essential(); }
  int ul_degree() const { return trace(); }
  int ug_degree() const { return form == Formulation::primal ? q - 1 : p - 1; }
};

Degrees make_degrees(Formulation f, int p);

// E_l xl' = J_l xl + C xg + B_l u_l + f,  0 = -C^T xl + B_g u_g
// with xl = [alpha (na), beta (nb), lambda (nl)] and lambda in facet_broken layout.
struct SystemBlocks {
  Degrees deg;
  SpMat E, J, C, Bl, Bg;
  int na = 0, nb = 0, nl = 0;
  int num_cells = 0;
  std::vector<int> g_entities;   // entity id of each xg DOF
  std::vector<int> ul_entities;  // essential-boundary control DOFs
  std::vector<int> ug_entities;  // natural-boundary control DOFs
  FormSpace alpha_space, beta_space, lambda_space, g_space;

  int nl_total() const { return na + nb + nl; }
  int ng() const { return int(g_entities.size()); }
  int off_alpha() const { return 0; }
  int off_beta() const { return na; }
  int off_lambda() const { return na + nb; }
  // x_l indices owned by cell t: alpha, beta, lambda DOFs in that order
  std::vector<int> cell_indices(int t) const;
};

SystemBlocks build_primal_hybrid(int p, const Mesh& mesh, const BoundaryPartition& bp, const Weights& w, int threads = 1);
SystemBlocks build_dual_hybrid(int q, const Mesh& mesh, const BoundaryPartition& bp, const Weights& w, int threads = 1);
SystemBlocks build_hybrid(Formulation f, int p, const Mesh& mesh, const BoundaryPartition& bp, const Weights& w, int threads = 1);

// Non-hybrid reference: x = [a, b], one of them conforming (all entities,
// essential ones included), the other broken. Essential DOFs follow the
// input through `essential` / `essential_map`:  x[essential] = Ress * u_l.
struct MixedSystem {
  Degrees deg;
  SpMat E, J, Bg;  // Bg: natural input, rows over x
  int na = 0, nb = 0;
  bool alpha_conforming = false;
  SpMat G;                       // conforming map of the conforming variable
  std::vector<int> essential;    // indices into x
  SpMat Ress;                    // |essential| x |ul_entities|
  std::vector<int> ul_entities, ug_entities;

  int dim() const { return na + nb; }
};

MixedSystem build_mixed_reference(Formulation f, int p, const Mesh& mesh, const BoundaryPartition& bp, const Weights& w);

struct CellPHDAE {
  Degrees deg;
  Eigen::MatrixXd M, J;  // state block [alpha; beta]
  Eigen::MatrixXd G;     // state x multiplier
  Eigen::MatrixXd B;     // multiplier x port
  // local multiplier/port DOFs on each face
  std::array<std::vector<int>, 4> face_dofs;
  Eigen::MatrixXd G_face(int lf) const;
  Eigen::MatrixXd B_face(int lf) const;
};

CellPHDAE build_cell_phdae(Formulation f, int p, const Mesh& mesh, int t, const Weights& w);

SystemBlocks interconnect(const std::vector<CellPHDAE>& cells, const Mesh& mesh, const BoundaryPartition& bp);

// entity lists of the trace space split by boundary ownership
std::vector<int> free_trace_entities(int k, const Mesh& mesh, const BoundaryPartition& bp, int essential);
std::vector<int> essential_entities(int k, const Mesh& mesh, const BoundaryPartition& bp, int essential);

// hybrid / mixed global dimensions for a Kuhn box, counts only
struct DofCount {
  long long mixed = 0, hybrid = 0;
};
DofCount dof_count(Formulation f, int p, long long n);

}  // namespace dfh
