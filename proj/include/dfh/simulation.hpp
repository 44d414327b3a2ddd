#pragma once

#include "dfh/diagnostics.hpp"

#include <map>
#include <string>
#include <vector>

namespace dfh {

struct RunOptions {
  Problem problem = Problem::wave;
  Formulation formulation = Formulation::primal;
  Profile profile = Profile::eigenmode;
  int n = 2;
  double dt = 0.01;
  double t_end = 1.0;
  std::string gamma1 = "lower";
  double c = 1.0, eps = 1.0, mu = 1.0;
  double tol = 1e-10;
  int threads = 1;
  bool zero_inputs = false;
};

ManufacturedCase make_case(const RunOptions& o);

// One hybrid problem: mesh, partition, blocks and the case driver.
struct HybridRun {
  explicit HybridRun(const RunOptions& o);
  // the driver points into mesh and bp
  HybridRun(const HybridRun&) = delete;
  HybridRun& operator=(const HybridRun&) = delete;
  RunOptions opt;
  Mesh mesh;
  BoundaryPartition bp;
  ManufacturedCase mc;
  SystemBlocks s;
  CaseDriver driver;
};

struct ConserveResult {
  std::vector<StepDiagnostics> steps;  // steps + 1 entries
  double max_residual = 0.0;           // max |residual| / max(|H|, 1)
  double energy_drift = 0.0;           // |H(end) - H(0)| / max(H(0), tiny)
  double max_div_change = 0.0;         // over the 2-form field, 0 if none
};
ConserveResult run_conserve(const RunOptions& o);

// broken cochain of the 2-form field of a formulation, empty if it has none
Eigen::VectorXd two_form_field(const SystemBlocks& s, const PhState& x);

struct EquivalenceResult {
  std::vector<std::string> names;       // shared variables
  std::vector<double> t;                // times, t0 included
  std::vector<std::vector<double>> diff;  // [time][variable] relative L2 difference
  double max_diff = 0.0;
};
EquivalenceResult run_equivalence(const RunOptions& o);

struct HybridSolution {
  Mesh mesh;
  SystemBlocks s;
  PhState x;
};

// run to t_end and return the final state (errors measured by the caller)
HybridSolution run_to_end(const RunOptions& o);

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  std::string variable, norm;
  double error = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  // (formulation/variable, norm) -> fitted rate
  std::map<std::pair<std::string, std::string>, double> rates;
  // per formulation pair: L2 distance between primal and dual fields, by n
  std::map<std::string, std::vector<double>> dual_difference;
  std::vector<int> ns;
};
// formulations: primal, dual or both (dual-field differences need both)
ConvergenceResult run_converge(const RunOptions& o, const std::vector<int>& ns, const std::vector<Formulation>& forms);

std::string to_string(Formulation f);

}  // namespace dfh
