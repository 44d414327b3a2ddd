#pragma once

#include "dfh/problems.hpp"
#include "dfh/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dfh {

double hamiltonian(const SystemBlocks& s, const PhState& x);
// (H1 - H0)/dt minus the midpoint boundary and source power
double power_residual(const SystemBlocks& s, const PhState& x0, const PhState& x1, const StepInputs& mid, double dt);

struct StepDiagnostics {
  double t = 0.0;
  double H = 0.0;
  double boundary_power = 0.0;
  double residual = 0.0;
  std::optional<double> div_norm;
};

// trace proxy on local face lf of cell t at x: scalar (k=0, component 0),
// tangential vector (k=1), component along the canonical normal (k=2)
using FacetTrace = std::function<Eigen::Vector3d(int t, int lf, const Vec3& x)>;

// per-cell solve of <v, P w>_{dT} = <v, w>_{dT} over broken facet DOFs
Eigen::VectorXd facet_annihilator_projection(int k, const FacetTrace& w, const Mesh& mesh);
// right-hand side <v_i, w>_{dT}
Eigen::VectorXd facet_load(int k, const FacetTrace& w, const Mesh& mesh);
// sqrt(sum_T h_T |v|^2_{dT})
double facet_norm(int k, const Eigen::VectorXd& v, const Mesh& mesh);

// exact multiplier of a formulation in the canonical facet convention:
// primal (n_c.n_out) p or E x n_out, dual sigma.n_out or H x n_out
FacetTrace exact_normal_trace(const ManufacturedCase& mc, Formulation f, const Mesh& mesh, double t);
// multipliers of a state in the canonical facet convention
Eigen::VectorXd canonical_multiplier(const SystemBlocks& s, const PhState& x, const Mesh& mesh);

// broken cochain vs field in L2, and in the graph norm of d (k <= 2)
double l2_error(int k, const Eigen::VectorXd& x, const Field& v, const Mesh& mesh, double t);
double d_error(int k, const Eigen::VectorXd& x, const Field& dv, const Mesh& mesh, double t);
// L2 norm of a broken cochain
double l2_norm(int k, const Eigen::VectorXd& x, const Mesh& mesh);
// L2 distance between two broken cochains of possibly different degree
double l2_distance(int ka, const Eigen::VectorXd& a, int kb, const Eigen::VectorXd& b, const Mesh& mesh);

struct ErrorEntry {
  std::string variable, norm;
  double error = 0.0;
};

struct ErrorReport {
  double h = 0.0;
  int degree = 1;
  std::vector<ErrorEntry> entries;
  double get(const std::string& variable, const std::string& norm) const;
};

std::string alpha_name(Problem p);
std::string beta_name(Problem p);
std::string norm_name(int k);  // H1, Hcurl, Hdiv

// errors of a hybrid state against the exact fields at time t
ErrorReport error_norms(const ManufacturedCase& mc, const SystemBlocks& s, const PhState& x, const Mesh& mesh, double t);

// L2 norm of d applied to a broken 2-cochain, in the 3-form mass norm
double divergence_norm(const Eigen::VectorXd& two_form, const Mesh& mesh);

// least-squares slope of log(error) against log(h)
double fit_rate(const std::vector<double>& h, const std::vector<double>& e);

struct DofRow {
  long long n = 0, mixed = 0, hybrid = 0;
  int ratio = 0;           // round(100 hybrid / mixed)
  int reference = -1;      // printed table value, -1 if none
  bool mismatch() const { return reference >= 0 && reference != ratio; }
};
std::vector<DofRow> dof_table(Formulation f, int p, const std::vector<long long>& ns);

}  // namespace dfh
