#pragma once

#include "dfh/physystem.hpp"
#include "dfh/solver.hpp"

#include <functional>
#include <string>

namespace dfh {

enum class Problem { wave, maxwell };
enum class Profile { eigenmode, quadratic };

Problem parse_problem(const std::string& s);
Profile parse_profile(const std::string& s);
std::string to_string(Problem p);
std::string to_string(Profile p);

// time profile f and its derivatives
struct TimeProfile {
  Profile kind = Profile::eigenmode;
  double operator()(int order, double t) const;
};

using Proxy = std::function<Eigen::Vector3d(const Vec3&)>;

// sum of space(x) * scale * f^(order)(t); scalar fields use component 0
struct Field {
  struct Term {
    Proxy space;
    int order = 0;
    double scale = 1.0;
  };
  int components = 1;
  std::vector<Term> terms;
  TimeProfile profile;

  Eigen::Vector3d operator()(const Vec3& x, double t) const;
  Field time_derivative() const;
  bool zero() const { return terms.empty(); }
};

struct ManufacturedCase {
  Problem problem = Problem::wave;
  Profile profile = Profile::eigenmode;
  int p = 3;  // 3 wave, 2 Maxwell
  double c = 1.0, eps = 1.0, mu = 1.0;
  // alpha: pressure or electric field; beta: velocity or magnetic field
  Field alpha, beta;
  Field source;  // enters the alpha equation
  // exterior derivative proxies of each field viewed as a k-form:
  // k=0 grad, k=1 curl, k=2 div; index by k
  std::array<Field, 3> d_alpha, d_beta;

  Weights weights() const;
  bool forced() const { return !source.zero(); }
};

ManufacturedCase wave_case(Profile profile, double c = 1.0);
ManufacturedCase maxwell_case(Profile profile, double eps = 1.0, double mu = 1.0);

// integral DOFs of a field on every entity of degree k (vertex values, edge
// circulations, face fluxes against the canonical normal, cell integrals)
Eigen::VectorXd interpolate(int k, const Field& v, const Mesh& mesh, double t);
// the same on a subset of entities
Eigen::VectorXd interpolate(int k, const Field& v, const Mesh& mesh, double t, const std::vector<int>& entities);
// broken DOFs, cell by cell
Eigen::VectorXd interpolate_broken(int k, const Field& v, const Mesh& mesh, double t);

// L2 projections; the conforming one keeps `fixed` DOFs at `values`
Eigen::VectorXd project_broken(int k, const Field& v, const Mesh& mesh, double t);
Eigen::VectorXd project_conforming(int k, const Field& v, const Mesh& mesh, double t, const std::vector<int>& fixed = {},
                                   const Eigen::VectorXd& values = {});

// load vector (v, phi_i) over broken k-forms
Eigen::VectorXd load_broken(int k, const Field& v, const Mesh& mesh, double t);

// Boundary inputs at time t: u1 is the trace of alpha on degree q-1
// entities, u2 the trace (-1)^p tr beta on degree p-1 entities, stored in
// the outer orientation of boundary faces.
Eigen::VectorXd input_u1(const ManufacturedCase& mc, const Mesh& mesh, double t, const std::vector<int>& entities);
Eigen::VectorXd input_u2(const ManufacturedCase& mc, const Mesh& mesh, double t, const std::vector<int>& entities);

// Everything a run needs for one formulation: inputs, loads, initial data.
class CaseDriver {
 public:
  CaseDriver(const ManufacturedCase& mc, Formulation f, const Mesh& mesh, const BoundaryPartition& bp);

  const ManufacturedCase& problem() const { return mc_; }
  // homogeneous run: inputs, sources and pinned initial DOFs all zero
  void set_zero_inputs(bool z) { zero_inputs_ = z; }
  Formulation formulation() const { return f_; }
  Degrees degrees() const { return deg_; }

  // inputs in the u_l / u_g slots of the hybrid system
  Eigen::VectorXd ul(double t, bool dt = false) const;
  Eigen::VectorXd ug(double t) const;
  Eigen::VectorXd hybrid_load(const SystemBlocks& s, double t) const;
  Eigen::VectorXd mixed_load(const MixedSystem& m, double t) const;
  StepInputs hybrid_inputs(const SystemBlocks& s, double t) const;
  StepInputs mixed_inputs(const MixedSystem& m, double t) const;

  // L2 projection with the conforming variable continuous and its essential
  // DOFs taken from the input; returns [a; b] in the mixed layout
  Eigen::VectorXd mixed_initial_state(const MixedSystem& m, double t) const;
  // the same state in broken layout [alpha; beta]
  Eigen::VectorXd hybrid_initial_state(double t) const;
  PhState hybrid_initial(const SystemBlocks& s, double t) const;

  // mixed-layout state [a; b] copied to the broken layout [alpha; beta]
  Eigen::VectorXd conforming_to_broken(const Eigen::VectorXd& mixed) const;

 private:
  ManufacturedCase mc_;
  Formulation f_;
  Degrees deg_;
  const Mesh* mesh_;
  const BoundaryPartition* bp_;
  std::vector<int> ul_entities_, ug_entities_;
  SpMat G_;  // conforming map of the conforming variable
  bool zero_inputs_ = false;
};

}  // namespace dfh
