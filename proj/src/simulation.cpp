#include "dfh/simulation.hpp"

#include <cmath>
#include <stdexcept>

namespace dfh {

std::string to_string(Formulation f) { return f == Formulation::primal ? "primal" : "dual"; }

ManufacturedCase make_case(const RunOptions& o) {
  return o.problem == Problem::wave ? wave_case(o.profile, o.c) : maxwell_case(o.profile, o.eps, o.mu);
}

namespace {

int kP(Problem p) { return p == Problem::wave ? 3 : 2; }

Box unit_box() { return Box{}; }

}  // namespace

HybridRun::HybridRun(const RunOptions& o)
    : opt(o),
      mesh(build_structured_box(o.n, unit_box())),
      bp(tag_boundary(mesh, gamma1_predicate(o.gamma1, unit_box()))),
      mc(make_case(o)),
      s(build_hybrid(o.formulation, kP(o.problem), mesh, bp, mc.weights(), o.threads)),
      driver(mc, o.formulation, mesh, bp) {
  driver.set_zero_inputs(o.zero_inputs);
}

Eigen::VectorXd two_form_field(const SystemBlocks& s, const PhState& x) {
  if (s.deg.alpha() == 2) return x.xl.segment(s.off_alpha(), s.na);
  if (s.deg.beta() == 2) return x.xl.segment(s.off_beta(), s.nb);
  return {};
}

ConserveResult run_conserve(const RunOptions& o) {
  HybridRun r(o);
  auto op = prepare(r.s, o.dt, o.threads, o.tol);
  TimeGrid grid = TimeGrid::from_end(o.dt, o.t_end);
  PhState x0 = r.driver.hybrid_initial(r.s, 0.0);
  const bool maxwell = o.problem == Problem::maxwell;
  ConserveResult res;
  auto div_of = [&](const PhState& x) -> std::optional<double> {
    if (!maxwell) return std::nullopt;
    Eigen::VectorXd w = two_form_field(r.s, x);
    if (w.size() == 0) return std::nullopt;
    return divergence_norm(w, r.mesh);
  };
  StepDiagnostics d0;
  d0.t = x0.t;
  d0.H = hamiltonian(r.s, x0);
  d0.div_norm = div_of(x0);
  res.steps.push_back(d0);
  Observer obs = [&](const PhState& x, const StepLog& l) {
    StepDiagnostics d;
    d.t = l.t;
    d.H = l.H;
    d.boundary_power = l.boundary_power + l.source_power;
    d.residual = l.residual;
    d.div_norm = div_of(x);
    res.steps.push_back(d);
  };
  auto inputs = [&](double t) { return r.driver.hybrid_inputs(r.s, t); };
  integrate(r.s, op, x0, inputs, grid, {obs}, o.threads);
  for (const auto& d : res.steps) {
    res.max_residual = std::max(res.max_residual, std::abs(d.residual) / std::max(std::abs(d.H), 1.0));
    if (d.div_norm && d0.div_norm) res.max_div_change = std::max(res.max_div_change, std::abs(*d.div_norm - *d0.div_norm));
  }
  res.energy_drift = std::abs(res.steps.back().H - d0.H) / std::max(std::abs(d0.H), 1e-300);
  return res;
}

EquivalenceResult run_equivalence(const RunOptions& o) {
  HybridRun r(o);
  MixedSystem ms = build_mixed_reference(o.formulation, kP(o.problem), r.mesh, r.bp, r.mc.weights());
  auto op = prepare(r.s, o.dt, o.threads, o.tol);
  MixedStepper ref(ms, o.dt, o.tol);
  TimeGrid grid = TimeGrid::from_end(o.dt, o.t_end);

  Eigen::VectorXd xm = r.driver.mixed_initial_state(ms, 0.0);
  PhState xh = r.driver.hybrid_initial(r.s, 0.0);
  EquivalenceResult res;
  res.names = {alpha_name(o.problem), beta_name(o.problem)};
  const int ka = r.s.deg.alpha(), kb = r.s.deg.beta();
  auto record = [&](double t) {
    Eigen::VectorXd bro = r.driver.conforming_to_broken(xm);
    Eigen::VectorXd ha = xh.xl.segment(r.s.off_alpha(), r.s.na), hb = xh.xl.segment(r.s.off_beta(), r.s.nb);
    Eigen::VectorXd ma = bro.head(r.s.na), mb = bro.tail(r.s.nb);
    auto rel = [&](int k, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
      double nb = l2_norm(k, b, r.mesh);
      double d = l2_norm(k, a - b, r.mesh);
      return nb > 0 ? d / nb : d;
    };
    std::vector<double> row = {rel(ka, ha, ma), rel(kb, hb, mb)};
    for (double v : row) res.max_diff = std::max(res.max_diff, v);
    res.t.push_back(t);
    res.diff.push_back(row);
  };
  record(0.0);
  for (int n = 0; n < grid.steps; ++n) {
    const double tm = xh.t + o.dt / 2;
    try {
      xh = step(op, r.s, xh, r.driver.hybrid_inputs(r.s, tm), o.threads);
      xm = ref.step(xm, r.driver.mixed_inputs(ms, tm));
    } catch (const NumericalError& e) {
      throw NumericalError("step " + std::to_string(n + 1) + ": " + e.what());
    }
    record(xh.t);
  }
  return res;
}

HybridSolution run_to_end(const RunOptions& o) {
  HybridRun r(o);
  auto op = prepare(r.s, o.dt, o.threads, o.tol);
  TimeGrid grid = TimeGrid::from_end(o.dt, o.t_end);
  PhState x0 = r.driver.hybrid_initial(r.s, 0.0);
  auto inputs = [&](double t) { return r.driver.hybrid_inputs(r.s, t); };
  Trajectory tr = integrate(r.s, op, x0, inputs, grid, {}, o.threads);
  return HybridSolution{r.mesh, r.s, tr.final};
}

ConvergenceResult run_converge(const RunOptions& o, const std::vector<int>& ns, const std::vector<Formulation>& forms) {
  if (ns.empty()) throw std::invalid_argument("converge: empty n list");
  ConvergenceResult res;
  res.ns = ns;
  ManufacturedCase mc = make_case(o);
  std::map<std::pair<std::string, std::string>, std::vector<double>> errs;
  std::vector<double> hs;
  for (int n : ns) {
    std::map<Formulation, HybridSolution> sol;
    double h = 0;
    for (Formulation f : forms) {
      RunOptions oo = o;
      oo.n = n;
      oo.formulation = f;
      sol.emplace(f, run_to_end(oo));
      const HybridSolution& hsol = sol.at(f);
      h = hsol.mesh.max_diameter();
      ErrorReport rep = error_norms(mc, hsol.s, hsol.x, hsol.mesh, hsol.x.t);
      for (const auto& e : rep.entries) {
        std::string var = to_string(f) + "_" + e.variable;
        res.rows.push_back({n, rep.h, var, e.norm, e.error});
        errs[{var, e.norm}].push_back(e.error);
      }
    }
    hs.push_back(h);
    if (sol.count(Formulation::primal) && sol.count(Formulation::dual)) {
      const auto& P = sol.at(Formulation::primal);
      const auto& D = sol.at(Formulation::dual);
      res.dual_difference[alpha_name(o.problem)].push_back(
          l2_distance(P.s.deg.alpha(), P.x.xl.segment(P.s.off_alpha(), P.s.na), D.s.deg.alpha(),
                      D.x.xl.segment(D.s.off_alpha(), D.s.na), P.mesh));
      res.dual_difference[beta_name(o.problem)].push_back(
          l2_distance(P.s.deg.beta(), P.x.xl.segment(P.s.off_beta(), P.s.nb), D.s.deg.beta(),
                      D.x.xl.segment(D.s.off_beta(), D.s.nb), P.mesh));
    }
  }
  if (ns.size() >= 2)
    for (const auto& [key, e] : errs) {
      bool positive = true;
      for (double v : e) positive = positive && v > 0;
      res.rates[key] = positive ? fit_rate(hs, e) : std::nan("");
    }
  return res;
}

}  // namespace dfh
