#include "doctest.h"
#include "dfh/simulation.hpp"

#include <cmath>
#include <random>

using namespace dfh;

namespace {

using V3 = Eigen::Vector3d;

Field constant(int comps, V3 c) {
  Field f;
  f.components = comps;
  f.terms.push_back({[c](const Vec3&) { return c; }, 0, 1.0});
  return f;
}

Field linear(int comps, const Eigen::Matrix3d& A) {
  Field f;
  f.components = comps;
  f.terms.push_back({[A](const Vec3& x) { return V3(A * x); }, 0, 1.0});
  return f;
}

// trace proxy of a constant field on every facet
FacetTrace constant_trace(int k, const Mesh& m, V3 c) {
  return [k, &m, c](int t, int lf, const Vec3&) -> V3 {
    if (k == 0) return V3(c[0], 0, 0);
    V3 n = cell_geometry(m, t).face_normal(lf);
    if (k == 1) return c - c.dot(n) * n;
    return V3(c.dot(n), 0, 0);
  };
}

}  // namespace

TEST_CASE("hamiltonian of constant fields") {
  Mesh m = build_structured_box(2);
  BoundaryPartition bp = tag_boundary(m, gamma1_predicate("lower"));
  SystemBlocks s = build_hybrid(Formulation::primal, 3, m, bp, Weights{0.25, 1.0});
  PhState x;
  x.xl = Eigen::VectorXd::Zero(s.nl_total());
  CHECK(hamiltonian(s, x) == 0.0);
  // p = 2 and sigma = (1, 2, 3) on the unit cube: 1/2 (c^-2 4 + 14)
  x.xl.segment(s.off_alpha(), s.na) = interpolate_broken(3, constant(1, V3(2, 0, 0)), m, 0.0);
  x.xl.segment(s.off_beta(), s.nb) = interpolate_broken(2, constant(3, V3(1, 2, 3)), m, 0.0);
  x.xl.segment(s.off_lambda(), s.nl).setConstant(5.0);
  CHECK(hamiltonian(s, x) == doctest::Approx(0.5 * (0.25 * 4 + 14)).epsilon(1e-13));
}

TEST_CASE("facet projection reproduces traces of constant fields") {
  Mesh m = build_structured_box(2);
  const V3 c(0.7, -1.3, 2.1);
  for (int k = 0; k <= 2; ++k) {
    CAPTURE(k);
    Eigen::VectorXd P = facet_annihilator_projection(k, constant_trace(k, m, c), m);
    Eigen::VectorXd I = interpolate_broken(k, constant(proxy_components(k), c), m, 0.0);
    CHECK((P - I).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("facet projection satisfies its defining relation") {
  Mesh m = build_structured_box(2);
  FacetTrace w = [](int, int, const Vec3& x) { return V3(std::sin(3 * x[0]) * std::exp(x[1]), x[2] * x[2], std::cos(x[0] * x[1])); };
  for (int k = 0; k <= 2; ++k) {
    CAPTURE(k);
    Eigen::VectorXd P = facet_annihilator_projection(k, w, m);
    Eigen::VectorXd b = facet_load(k, w, m);
    const int N = num_local_dofs(k);
    for (int t = 0; t < m.num_cells(); ++t) {
      Eigen::VectorXd r = local_facet_mass(k, cell_geometry(m, t)) * P.segment(t * N, N) - b.segment(t * N, N);
      CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-12);
    }
    // the trace of P projects onto itself
    FacetTrace wp = [&](int t, int lf, const Vec3& x) -> V3 {
      CellGeometry g = cell_geometry(m, t);
      Eigen::Vector4d bary = Eigen::Vector4d::Unit(0);
      bary += g.grad * (x - g.x[0]);
      V3 r = V3::Zero();
      Eigen::VectorXd v = eval_trace(k, g, lf, bary).transpose() * P.segment(t * N, N);
      r.head(v.size()) = v;
      return r;
    };
    Eigen::VectorXd P2 = facet_annihilator_projection(k, wp, m);
    CHECK(facet_norm(k, P2 - P, m) <= 1e-12 * facet_norm(k, P, m));
  }
  CHECK_THROWS_AS(facet_annihilator_projection(3, w, m), std::invalid_argument);
}

TEST_CASE("facet norm weights by cell diameter") {
  Mesh m = build_structured_box(1);
  // scalar trace 1 on every facet: sum over cells of h_T * |dT|
  Eigen::VectorXd one = Eigen::VectorXd::Ones(4 * m.num_cells());
  double expect = 0;
  for (int t = 0; t < m.num_cells(); ++t) {
    CellGeometry g = cell_geometry(m, t);
    double area = 0;
    for (int lf = 0; lf < 4; ++lf) area += g.face_area(lf);
    expect += g.diameter * area;
  }
  CHECK(facet_norm(0, one, m) == doctest::Approx(std::sqrt(expect)).epsilon(1e-13));
}

TEST_CASE("divergence norm") {
  Mesh m = build_structured_box(3);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  // curls of arbitrary local 1-cochains are divergence free
  Eigen::VectorXd x(4 * m.num_cells());
  for (int t = 0; t < m.num_cells(); ++t) {
    Eigen::VectorXd y(6);
    for (int i = 0; i < 6; ++i) y[i] = U(rng);
    x.segment(4 * t, 4) = incidence(1, m.orientation[t]).cast<double>() * y;
  }
  CHECK(divergence_norm(x, m) <= 1e-13);
  // (x, 0, 0) has divergence 1, so the norm is the square root of the volume
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  A(0, 0) = 1;
  CHECK(divergence_norm(interpolate_broken(2, linear(3, A), m, 0.0), m) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(divergence_norm(Eigen::VectorXd::Zero(3), m), std::invalid_argument);
}

TEST_CASE("error measures") {
  Mesh m = build_structured_box(2);
  // lowest-order fields: a + b x r (edges) and a + s r (faces)
  const V3 a(1, 2, -0.5), b(0.3, -1, 2);
  const double sc = 1.7;
  Field ned, rt;
  ned.components = rt.components = 3;
  ned.terms.push_back({[a, b](const Vec3& x) { return V3(a + b.cross(x)); }, 0, 1.0});
  rt.terms.push_back({[a, sc](const Vec3& x) { return V3(a + sc * x); }, 0, 1.0});
  const Field* fields[] = {nullptr, &ned, &rt};
  for (int k = 1; k <= 2; ++k) {
    Eigen::VectorXd I = interpolate_broken(k, *fields[k], m, 0.0);
    CHECK(l2_error(k, I, *fields[k], m, 0.0) <= 1e-12);
    Field zero = constant(3, V3::Zero());
    CHECK(l2_error(k, I, zero, m, 0.0) == doctest::Approx(l2_norm(k, I, m)).epsilon(1e-12));
  }
  CHECK(d_error(1, interpolate_broken(1, ned, m, 0.0), constant(3, 2 * b), m, 0.0) <= 1e-12);
  CHECK(d_error(2, interpolate_broken(2, rt, m, 0.0), constant(1, V3(3 * sc, 0, 0)), m, 0.0) <= 1e-12);
  CHECK(d_error(1, interpolate_broken(1, ned, m, 0.0), constant(3, V3::Zero()), m, 0.0) ==
        doctest::Approx(2 * b.norm()).epsilon(1e-12));
  // the same vector field seen as a 1-form and as a 2-form
  V3 c(1, -2, 0.5);
  Eigen::VectorXd e1 = interpolate_broken(1, constant(3, c), m, 0.0), f2 = interpolate_broken(2, constant(3, c), m, 0.0);
  CHECK(l2_distance(1, e1, 2, f2, m) <= 1e-12);
  CHECK(l2_distance(1, 2 * e1, 2, f2, m) == doctest::Approx(c.norm()).epsilon(1e-12));
  CHECK_THROWS_AS(l2_distance(0, Eigen::VectorXd::Zero(4 * m.num_cells()), 1, e1, m), std::invalid_argument);
}

TEST_CASE("rate fit") {
  std::vector<double> h{1, 0.5, 0.25}, e{3, 0.75, 0.1875};
  CHECK(fit_rate(h, e) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fit_rate({0.2, 0.1}, {0.04, 0.02}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(fit_rate({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate({1.0, 0.5}, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate({0.5, 0.5}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("dof tables") {
  const std::vector<long long> ns{1, 2, 4, 8, 16};
  auto wp = dof_table(Formulation::primal, 3, ns);
  auto wd = dof_table(Formulation::dual, 3, ns);
  const int ep[] = {75, 71, 69, 68, 67}, ed[] = {18, 9, 5, 4, 3};
  for (int i = 0; i < 5; ++i) {
    CHECK(wp[i].ratio == ep[i]);
    CHECK(wd[i].ratio == ed[i]);
    CHECK_FALSE(wp[i].mismatch());
    CHECK_FALSE(wd[i].mismatch());
  }
  // n = 1 wave primal by hand: 6 tets, 12 boundary and 6 interior
  // triangles; mixed adds one pressure per cell
  CHECK(wp[0].hybrid == 18);
  CHECK(wp[0].mixed == 24);
  auto mx = dof_table(Formulation::primal, 2, ns);
  for (const auto& r : mx) CHECK(r.mismatch() == (r.n == 2));
  CHECK(mx[1].ratio == 34);
  CHECK_THROWS_AS(dof_table(Formulation::primal, 3, {0}), std::invalid_argument);
}

TEST_CASE("power residual of eigenmode steps") {
  for (Formulation f : {Formulation::primal, Formulation::dual})
    for (Problem p : {Problem::wave, Problem::maxwell}) {
      RunOptions o;
      o.problem = p;
      o.formulation = f;
      o.n = 2;
      o.dt = 0.05;
      o.t_end = 0.5;
      ConserveResult r = run_conserve(o);
      CAPTURE(to_string(p));
      CAPTURE(to_string(f));
      CHECK(r.steps.size() == 11);
      CHECK(r.max_residual <= 1e-10);
      for (const auto& d : r.steps) CHECK(d.div_norm.has_value() == (p == Problem::maxwell));
    }
}

TEST_CASE("homogeneous runs conserve energy and divergence") {
  for (Formulation f : {Formulation::primal, Formulation::dual}) {
    RunOptions o;
    o.problem = Problem::maxwell;
    o.formulation = f;
    o.n = 2;
    o.dt = 0.02;
    o.t_end = 0.4;
    o.zero_inputs = true;
    o.gamma1 = "all";
    ConserveResult r = run_conserve(o);
    CHECK(r.steps.front().H > 0.0);
    CHECK(r.energy_drift <= 1e-11);
    CHECK(r.max_div_change <= 1e-10);
  }
}

TEST_CASE("exact states have small errors and traces of the right sign") {
  const double t = 0.3;
  for (Formulation f : {Formulation::primal, Formulation::dual})
    for (Problem p : {Problem::wave, Problem::maxwell}) {
      CAPTURE(to_string(p));
      CAPTURE(to_string(f));
      std::vector<double> err;
      for (int n : {2, 4}) {
        RunOptions o;
        o.problem = p;
        o.formulation = f;
        o.n = n;
        HybridRun r(o);
        PhState x = r.driver.hybrid_initial(r.s, t);
        ErrorReport rep = error_norms(r.mc, r.s, x, r.mesh, t);
        const int kt = r.s.deg.trace();
        double size = facet_norm(kt, facet_annihilator_projection(kt, exact_normal_trace(r.mc, f, r.mesh, t), r.mesh), r.mesh);
        // a flipped sign would give an error close to twice the size
        CHECK(rep.get("normal_trace", "facet") < 0.6 * size);
        err.push_back(rep.get("normal_trace", "facet"));
        CHECK(rep.get(alpha_name(p), "L2") < 0.2);
        CHECK(rep.h == doctest::Approx(std::sqrt(3.0) / n));
      }
      CHECK(err[1] < err[0]);
    }
}

TEST_CASE("short convergence study") {
  RunOptions o;
  o.profile = Profile::quadratic;
  o.dt = 0.02;
  o.t_end = 0.4;
  for (Problem p : {Problem::wave, Problem::maxwell}) {
    o.problem = p;
    ConvergenceResult r = run_converge(o, {2, 4}, {Formulation::primal, Formulation::dual});
    // per n: L2 and graph norm of each variable below degree 3, plus the facet error
    CHECK(r.rows.size() == (p == Problem::wave ? 2 * (4 + 5) : 2 * (5 + 5)));
    for (const std::string& form : {"primal", "dual"}) {
      const double rate = r.rates.at({form + "_" + alpha_name(p), "L2"});
      CHECK(rate > 0.8);
    }
    for (const auto& [name, d] : r.dual_difference) {
      CAPTURE(name);
      REQUIRE(d.size() == 2);
      CHECK(d[1] < d[0]);
    }
  }
}

TEST_CASE("hybrid and mixed runs agree") {
  RunOptions o;
  o.problem = Problem::wave;
  o.formulation = Formulation::dual;
  o.dt = 0.05;
  o.t_end = 0.5;
  EquivalenceResult r = run_equivalence(o);
  CHECK(r.t.size() == 11);
  CHECK(r.names == std::vector<std::string>{"pressure", "velocity"});
  CHECK(r.max_diff <= 1e-10);
}
