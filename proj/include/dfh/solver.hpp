#pragma once

#include "dfh/physystem.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <functional>
#include <memory>
#include <stdexcept>

namespace dfh {

// singular factorization, NaN/Inf, residual above tolerance
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TimeGrid {
  double dt = 0.01;
  int steps = 0;
  double t_end() const { return steps * dt; }
  double t(int n) const { return n * dt; }
  // steps = round(t_end / dt); rejects t_end that is not a multiple of dt
  static TimeGrid from_end(double dt, double t_end);
};

struct PhState {
  Eigen::VectorXd xl, xg;
  double t = 0.0;
  int step = 0;
};

// inputs at one time; empty vectors mean zero
struct StepInputs {
  Eigen::VectorXd ul, ug, f;
};

struct CondensedOperator {
  double dt = 0.0;
  double tol = 1e-10;
  // row/column scaling: 1 on states, 2/dt on multiplier rows and columns so
  // that the blocks stay O(1) as dt -> 0
  Eigen::VectorXd scale;
  std::vector<std::vector<int>> cell_idx;
  std::vector<Eigen::MatrixXd> blocks;  // scaled A-blocks
  std::vector<Eigen::FullPivLU<Eigen::MatrixXd>> lu;
  SpMat Cs;  // scaled (dt/2) C
  SpMat S;
  std::shared_ptr<Eigen::SparseLU<SpMat>> S_lu;

  int num_blocks() const { return int(blocks.size()); }
  // A^{-1} v with A the scaled block-diagonal matrix
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& v, int threads = 1) const;
};

CondensedOperator prepare(const SystemBlocks& s, double dt, int threads = 1, double tol = 1e-10);

// one implicit midpoint step; `mid` holds the inputs at t + dt/2
PhState step(const CondensedOperator& op, const SystemBlocks& s, const PhState& x, const StepInputs& mid, int threads = 1);

// the same step through the full saddle matrix [[A, -C], [C^T, 0]]
PhState monolithic_solve(const SystemBlocks& s, const PhState& x, const StepInputs& mid, double dt, double tol = 1e-10);

// x_g from the multiplier rows, multipliers from the index-reduced system
struct InitialInputs {
  Eigen::VectorXd ul, ul_dot, ug, f;
};
PhState consistent_initialization(const SystemBlocks& s, const Eigen::VectorXd& state, const InitialInputs& in, double t0 = 0.0);

// H = 1/2 x^T E x
double energy(const SpMat& E, const Eigen::VectorXd& x);

struct MidpointPower {
  double boundary = 0.0;  // essential + natural ports
  double source = 0.0;    // x_mid^T f
};
MidpointPower midpoint_power(const SystemBlocks& s, const PhState& x0, const PhState& x1, const StepInputs& mid);

struct StepLog {
  int step = 0;
  double t = 0.0;
  double H = 0.0;
  double boundary_power = 0.0;
  double source_power = 0.0;
  double residual = 0.0;  // (H1 - H0)/dt - boundary - source
};

using InputFn = std::function<StepInputs(double t)>;
using Observer = std::function<void(const PhState&, const StepLog&)>;

struct Trajectory {
  PhState final;
  std::vector<StepLog> log;  // steps + 1 entries, the first at t0
};

Trajectory integrate(const SystemBlocks& s, const CondensedOperator& op, const PhState& x0, const InputFn& inputs,
                     const TimeGrid& grid, const std::vector<Observer>& observers = {}, int threads = 1);

// Midpoint stepper of the non-hybrid reference. Essential rows impose the
// midpoint average: (x1_e + x0_e)/2 = Ress u_l(t + dt/2).
class MixedStepper {
 public:
  MixedStepper(const MixedSystem& m, double dt, double tol = 1e-10);
  Eigen::VectorXd step(const Eigen::VectorXd& x, const StepInputs& mid) const;
  // boundary power at the midpoint, the essential part from the reaction rows
  MidpointPower power(const Eigen::VectorXd& x0, const Eigen::VectorXd& x1, const StepInputs& mid) const;
  const MixedSystem& system() const { return *m_; }
  double dt() const { return dt_; }

 private:
  const MixedSystem* m_;
  double dt_, tol_;
  std::vector<char> is_ess_;
  SpMat K_, Rhs_;
  std::shared_ptr<Eigen::SparseLU<SpMat>> lu_;
};

// constrained initial state of the reference: essential DOFs from the input
Eigen::VectorXd mixed_initial(const MixedSystem& m, const Eigen::VectorXd& x, const Eigen::VectorXd& ul);

}  // namespace dfh
