#include "dfh/solver.hpp"
#include "dfh/parallel.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace dfh {

namespace {

Eigen::VectorXd or_zero(const Eigen::VectorXd& v, Eigen::Index n) {
  if (v.size() == 0) return Eigen::VectorXd::Zero(n);
  if (v.size() != n) throw std::invalid_argument("input vector has length " + std::to_string(v.size()) + ", expected " + std::to_string(n));
  return v;
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

void check_residual(double res, double ref, double tol, const std::string& what) {
  if (!(res <= tol * std::max(ref, 1e-300)) && res != 0.0)
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", res / ref);
    throw NumericalError(what + ": relative residual " + buf + " above tolerance");
  }
}

// b_l and b_g of the two-sided midpoint system, b_l already scaled
void midpoint_rhs(const CondensedOperator& op, const SystemBlocks& s, const PhState& x, const StepInputs& mid,
                  Eigen::VectorXd& bl, Eigen::VectorXd& bg) {
  const double h = op.dt / 2;
  const int N = s.nl_total();
  Eigen::VectorXd ul = or_zero(mid.ul, s.Bl.cols()), ug = or_zero(mid.ug, s.Bg.cols()), f = or_zero(mid.f, N);
  bl = s.E * x.xl + h * (s.J * x.xl) + h * (s.C * x.xg) + op.dt * (s.Bl * ul + f);
  bl = op.scale.cwiseProduct(bl);
  bg = -h * (s.C.transpose() * x.xl) + op.dt * (s.Bg * ug);
}

}  // namespace

TimeGrid TimeGrid::from_end(double dt, double t_end) {
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  if (t_end < 0) throw std::invalid_argument("t_end must be nonnegative");
  double r = t_end / dt;
  long long n = std::llround(r);
  if (std::abs(r - n) > 1e-9 * std::max(1.0, r)) throw std::invalid_argument("t_end is not a multiple of dt");
  return TimeGrid{dt, int(n)};
}

Eigen::VectorXd CondensedOperator::apply_inverse(const Eigen::VectorXd& v, int threads) const {
  Eigen::VectorXd out(v.size());
  parallel_for(num_blocks(), threads, [&](int t) {
    const auto& idx = cell_idx[t];
    Eigen::VectorXd r(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) r[i] = v[idx[i]];
    Eigen::VectorXd y = lu[t].solve(r);
    for (std::size_t i = 0; i < idx.size(); ++i) out[idx[i]] = y[i];
  });
  return out;
}

CondensedOperator prepare(const SystemBlocks& s, double dt, int threads, double tol) {
  if (!(dt > 0)) throw std::invalid_argument("prepare: dt must be positive");
  CondensedOperator op;
  op.dt = dt;
  op.tol = tol;
  const double h = dt / 2;
  const int N = s.nl_total();
  op.scale = Eigen::VectorXd::Ones(N);
  op.scale.tail(s.nl).setConstant(1.0 / h);
  SpMat A = s.E - h * s.J;
  A = op.scale.asDiagonal() * A * op.scale.asDiagonal();
  op.Cs = op.scale.asDiagonal() * (h * s.C);

  const int C = s.num_cells;
  std::vector<int> owner(N), local(N);
  op.cell_idx.resize(C);
  for (int t = 0; t < C; ++t) {
    op.cell_idx[t] = s.cell_indices(t);
    for (std::size_t i = 0; i < op.cell_idx[t].size(); ++i) {
      owner[op.cell_idx[t][i]] = t;
      local[op.cell_idx[t][i]] = int(i);
    }
  }
  op.blocks.resize(C);
  for (int t = 0; t < C; ++t) op.blocks[t] = Eigen::MatrixXd::Zero(op.cell_idx[t].size(), op.cell_idx[t].size());
  for (int j = 0; j < A.outerSize(); ++j)
    for (SpMat::InnerIterator it(A, j); it; ++it) {
      int r = int(it.row()), c = int(it.col());
      if (owner[r] != owner[c]) throw NumericalError("A couples cells " + std::to_string(owner[r]) + " and " + std::to_string(owner[c]));
      op.blocks[owner[r]](local[r], local[c]) += it.value();
    }

  // Schur complement: per-cell contributions C_t^T A_t^{-1} C_t
  Eigen::SparseMatrix<double, Eigen::RowMajor> Crow = op.Cs;
  op.lu.resize(C);
  std::vector<Triplets> part(C);
  parallel_for(C, threads, [&](int t) {
    op.lu[t].compute(op.blocks[t]);
    if (!op.lu[t].isInvertible()) throw NumericalError("singular A-block in cell " + std::to_string(t));
    const auto& idx = op.cell_idx[t];
    std::vector<int> cols;
    for (int i : idx)
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Crow, i); it; ++it) cols.push_back(int(it.col()));
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    if (cols.empty()) return;
    Eigen::MatrixXd Ct = Eigen::MatrixXd::Zero(idx.size(), cols.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Crow, idx[i]); it; ++it) {
        int c = int(std::lower_bound(cols.begin(), cols.end(), int(it.col())) - cols.begin());
        Ct(i, c) = it.value();
      }
    Eigen::MatrixXd St = Ct.transpose() * op.lu[t].solve(Ct);
    for (std::size_t a = 0; a < cols.size(); ++a)
      for (std::size_t b = 0; b < cols.size(); ++b) part[t].emplace_back(cols[a], cols[b], St(a, b));
  });
  Triplets all;
  for (auto& p : part) all.insert(all.end(), p.begin(), p.end());
  op.S.resize(s.ng(), s.ng());
  op.S.setFromTriplets(all.begin(), all.end());
  op.S_lu = std::make_shared<Eigen::SparseLU<SpMat>>();
  if (s.ng() > 0) {
    op.S_lu->compute(op.S);
    if (op.S_lu->info() != Eigen::Success) throw NumericalError("Schur complement factorization failed");
  }
  return op;
}

PhState step(const CondensedOperator& op, const SystemBlocks& s, const PhState& x, const StepInputs& mid, int threads) {
  Eigen::VectorXd bl, bg;
  midpoint_rhs(op, s, x, mid, bl, bg);
  Eigen::VectorXd Ab = op.apply_inverse(bl, threads);
  PhState y;
  y.t = x.t + op.dt;
  y.step = x.step + 1;
  if (s.ng() > 0) {
    Eigen::VectorXd r = bg - op.Cs.transpose() * Ab;
    y.xg = op.S_lu->solve(r);
    check_residual((op.S * y.xg - r).norm(), std::max(r.norm(), (op.S * y.xg).norm()), op.tol,
                   "Schur solve at step " + std::to_string(y.step));
    y.xl = op.apply_inverse(bl + op.Cs * y.xg, threads);
  } else {
    y.xg = Eigen::VectorXd::Zero(0);
    y.xl = Ab;
  }
  y.xl = op.scale.cwiseProduct(y.xl);
  if (!finite(y.xl) || !finite(y.xg)) throw NumericalError("non-finite state at step " + std::to_string(y.step));
  return y;
}

PhState monolithic_solve(const SystemBlocks& s, const PhState& x, const StepInputs& mid, double dt, double tol) {
  if (!(dt > 0)) throw std::invalid_argument("monolithic_solve: dt must be positive");
  const double h = dt / 2;
  const int N = s.nl_total(), G = s.ng();
  Eigen::VectorXd sc = Eigen::VectorXd::Ones(N);
  sc.tail(s.nl).setConstant(1.0 / h);
  SpMat A = sc.asDiagonal() * SpMat(s.E - h * s.J) * sc.asDiagonal();
  SpMat Cs = sc.asDiagonal() * (h * s.C);
  Triplets tr;
  for (int j = 0; j < A.outerSize(); ++j)
    for (SpMat::InnerIterator it(A, j); it; ++it) tr.emplace_back(it.row(), it.col(), it.value());
  for (int j = 0; j < Cs.outerSize(); ++j)
    for (SpMat::InnerIterator it(Cs, j); it; ++it) {
      tr.emplace_back(it.row(), N + it.col(), -it.value());
      tr.emplace_back(N + it.col(), it.row(), it.value());
    }
  SpMat K(N + G, N + G);
  K.setFromTriplets(tr.begin(), tr.end());

  CondensedOperator tmp;
  tmp.dt = dt;
  tmp.scale = sc;
  Eigen::VectorXd bl, bg;
  midpoint_rhs(tmp, s, x, mid, bl, bg);
  Eigen::VectorXd b(N + G);
  b << bl, bg;
  Eigen::SparseLU<SpMat> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success) throw NumericalError("singular saddle matrix");
  Eigen::VectorXd z = lu.solve(b);
  check_residual((K * z - b).norm(), std::max(b.norm(), (K * z).norm()), tol, "saddle solve");
  PhState y;
  y.t = x.t + dt;
  y.step = x.step + 1;
  y.xl = sc.cwiseProduct(z.head(N));
  y.xg = z.tail(G);
  if (!finite(y.xl) || !finite(y.xg)) throw NumericalError("non-finite state at step " + std::to_string(y.step));
  return y;
}

PhState consistent_initialization(const SystemBlocks& s, const Eigen::VectorXd& state, const InitialInputs& in, double t0) {
  const int nd = s.na + s.nb, nl = s.nl, G = s.ng(), N = s.nl_total();
  if (state.size() != nd) throw std::invalid_argument("initial state has wrong length");
  Eigen::VectorXd ul = or_zero(in.ul, s.Bl.cols()), uld = or_zero(in.ul_dot, s.Bl.cols());
  Eigen::VectorXd ug = or_zero(in.ug, s.Bg.cols()), f = or_zero(in.f, N);
  SpMat Cl = s.C.bottomRows(nl);
  SpMat Jld = s.J.block(nd, 0, nl, nd), Jdl = s.J.block(0, nd, nd, nl), Jdd = s.J.topLeftCorner(nd, nd);
  SpMat Ed = s.E.topLeftCorner(nd, nd);
  SpMat Bll = s.Bl.bottomRows(nl);

  PhState x;
  x.t = t0;
  x.xl = Eigen::VectorXd::Zero(N);
  x.xl.head(nd) = state;
  x.xg = Eigen::VectorXd::Zero(G);
  if (G > 0) {
    // multiplier rows: 0 = J_ld x_d + C_l x_g + B_l u_l, least squares in x_g
    SpMat CtC = Cl.transpose() * Cl;
    Eigen::SimplicialLDLT<SpMat> ldlt(CtC);
    if (ldlt.info() != Eigen::Success) throw NumericalError("C^T C factorization failed");
    x.xg = ldlt.solve(-(Cl.transpose() * (Jld * state + Bll * ul)));
  }
  // (xd', lambda, xg') from the state rows, the differentiated multiplier
  // rows and the global constraint
  Triplets tr;
  auto put = [&](const SpMat& A, int r0, int c0, double sgn) {
    for (int j = 0; j < A.outerSize(); ++j)
      for (SpMat::InnerIterator it(A, j); it; ++it) tr.emplace_back(r0 + it.row(), c0 + it.col(), sgn * it.value());
  };
  put(Ed, 0, 0, 1);
  put(Jdl, 0, nd, -1);
  put(Jld, nd, 0, 1);
  put(Cl, nd, nd + nl, 1);
  put(SpMat(Cl.transpose()), nd + nl, nd, -1);
  SpMat K(N + G, N + G);
  K.setFromTriplets(tr.begin(), tr.end());
  Eigen::VectorXd b(N + G);
  b << Jdd * state + f.head(nd), -(Bll * uld), -(s.Bg * ug);
  Eigen::SparseLU<SpMat> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success) throw NumericalError("consistent initialization: singular index-reduced system");
  Eigen::VectorXd z = lu.solve(b);
  check_residual((K * z - b).norm(), std::max(b.norm(), (K * z).norm()), 1e-8, "consistent initialization");
  x.xl.tail(nl) = z.segment(nd, nl);
  return x;
}

double energy(const SpMat& E, const Eigen::VectorXd& x) { return 0.5 * x.dot(E * x); }

MidpointPower midpoint_power(const SystemBlocks& s, const PhState& x0, const PhState& x1, const StepInputs& mid) {
  Eigen::VectorXd xm = 0.5 * (x0.xl + x1.xl);
  Eigen::VectorXd gm = 0.5 * (x0.xg + x1.xg);
  MidpointPower p;
  p.boundary = xm.dot(s.Bl * or_zero(mid.ul, s.Bl.cols())) + gm.dot(s.Bg * or_zero(mid.ug, s.Bg.cols()));
  p.source = xm.dot(or_zero(mid.f, s.nl_total()));
  return p;
}

Trajectory integrate(const SystemBlocks& s, const CondensedOperator& op, const PhState& x0, const InputFn& inputs,
                     const TimeGrid& grid, const std::vector<Observer>& observers, int threads) {
  if (std::abs(grid.dt - op.dt) > 1e-15 * op.dt) throw std::invalid_argument("integrate: grid and operator time steps differ");
  Trajectory tr;
  tr.final = x0;
  StepLog l0;
  l0.step = x0.step;
  l0.t = x0.t;
  l0.H = energy(s.E, x0.xl);
  tr.log.push_back(l0);
  for (int n = 0; n < grid.steps; ++n) {
    StepInputs mid = inputs(tr.final.t + grid.dt / 2);
    PhState x1 = step(op, s, tr.final, mid, threads);
    MidpointPower p = midpoint_power(s, tr.final, x1, mid);
    StepLog l;
    l.step = x1.step;
    l.t = x1.t;
    l.H = energy(s.E, x1.xl);
    l.boundary_power = p.boundary;
    l.source_power = p.source;
    l.residual = (l.H - tr.log.back().H) / grid.dt - p.boundary - p.source;
    tr.log.push_back(l);
    tr.final = std::move(x1);
    for (const auto& o : observers) o(tr.final, l);
  }
  return tr;
}

MixedStepper::MixedStepper(const MixedSystem& m, double dt, double tol) : m_(&m), dt_(dt), tol_(tol) {
  if (!(dt > 0)) throw std::invalid_argument("MixedStepper: dt must be positive");
  const int N = m.dim();
  const double h = dt / 2;
  is_ess_.assign(N, 0);
  for (int e : m.essential) is_ess_[e] = 1;
  SpMat Am = m.E - h * m.J, Ap = m.E + h * m.J;
  Triplets tk, tr;
  for (int j = 0; j < N; ++j) {
    for (SpMat::InnerIterator it(Am, j); it; ++it)
      if (!is_ess_[it.row()]) tk.emplace_back(it.row(), j, it.value());
    for (SpMat::InnerIterator it(Ap, j); it; ++it)
      if (!is_ess_[it.row()]) tr.emplace_back(it.row(), j, it.value());
  }
  for (int e : m.essential) {
    tk.emplace_back(e, e, 0.5);
    tr.emplace_back(e, e, -0.5);
  }
  K_.resize(N, N);
  K_.setFromTriplets(tk.begin(), tk.end());
  Rhs_.resize(N, N);
  Rhs_.setFromTriplets(tr.begin(), tr.end());
  lu_ = std::make_shared<Eigen::SparseLU<SpMat>>();
  lu_->compute(K_);
  if (lu_->info() != Eigen::Success) throw NumericalError("singular mixed midpoint matrix");
}

Eigen::VectorXd MixedStepper::step(const Eigen::VectorXd& x, const StepInputs& mid) const {
  const MixedSystem& m = *m_;
  const int N = m.dim();
  Eigen::VectorXd b = Rhs_ * x + dt_ * (m.Bg * or_zero(mid.ug, m.Bg.cols()) + or_zero(mid.f, N));
  Eigen::VectorXd ess = m.Ress * or_zero(mid.ul, m.Ress.cols());
  for (std::size_t i = 0; i < m.essential.size(); ++i) b[m.essential[i]] = -0.5 * x[m.essential[i]] + ess[i];
  Eigen::VectorXd y = lu_->solve(b);
  check_residual((K_ * y - b).norm(), std::max(b.norm(), (K_ * y).norm()), tol_, "mixed step");
  if (!finite(y)) throw NumericalError("non-finite mixed state");
  return y;
}

MidpointPower MixedStepper::power(const Eigen::VectorXd& x0, const Eigen::VectorXd& x1, const StepInputs& mid) const {
  const MixedSystem& m = *m_;
  const int N = m.dim();
  Eigen::VectorXd xm = 0.5 * (x0 + x1);
  Eigen::VectorXd bu = m.Bg * or_zero(mid.ug, m.Bg.cols()), f = or_zero(mid.f, N);
  Eigen::VectorXd r = m.E * (x1 - x0) / dt_ - m.J * xm - bu - f;
  MidpointPower p;
  p.boundary = xm.dot(bu);
  for (int e : m.essential) p.boundary += xm[e] * r[e];
  p.source = xm.dot(f);
  return p;
}

Eigen::VectorXd mixed_initial(const MixedSystem& m, const Eigen::VectorXd& x, const Eigen::VectorXd& ul) {
  Eigen::VectorXd y = x;
  Eigen::VectorXd v = m.Ress * or_zero(ul, m.Ress.cols());
  for (std::size_t i = 0; i < m.essential.size(); ++i) y[m.essential[i]] = v[i];
  return y;
}

}  // namespace dfh
