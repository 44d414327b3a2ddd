#include "doctest.h"
#include "dfh/problems.hpp"

#include <cmath>
#include <random>

using namespace dfh;

namespace {

using V3 = Eigen::Vector3d;

// fourth-order central difference of a field component along axis a
double partial(const Field& v, const Vec3& x, double t, int comp, int a) {
  const double h = 1e-3;
  Vec3 e = Vec3::Zero();
  e[a] = h;
  return (-v(x + 2 * e, t)[comp] + 8 * v(x + e, t)[comp] - 8 * v(x - e, t)[comp] + v(x - 2 * e, t)[comp]) / (12 * h);
}

double fd_div(const Field& v, const Vec3& x, double t) {
  return partial(v, x, t, 0, 0) + partial(v, x, t, 1, 1) + partial(v, x, t, 2, 2);
}

V3 fd_curl(const Field& v, const Vec3& x, double t) {
  return V3(partial(v, x, t, 2, 1) - partial(v, x, t, 1, 2), partial(v, x, t, 0, 2) - partial(v, x, t, 2, 0),
            partial(v, x, t, 1, 0) - partial(v, x, t, 0, 1));
}

V3 fd_grad(const Field& v, const Vec3& x, double t) {
  return V3(partial(v, x, t, 0, 0), partial(v, x, t, 0, 1), partial(v, x, t, 0, 2));
}

// time derivative by the same stencil
V3 fd_dt(const Field& v, const Vec3& x, double t) {
  const double h = 1e-3;
  return (-v(x, t + 2 * h) + 8 * v(x, t + h) - 8 * v(x, t - h) + v(x, t - 2 * h)) / (12 * h);
}

Field constant(int comps, V3 c) {
  Field f;
  f.components = comps;
  f.profile = TimeProfile{Profile::eigenmode};
  f.terms.push_back({[c](const Vec3&) { return c; }, 0, 1.0});
  return f;
}

Field affine(int comps, Eigen::Matrix3d A, V3 b) {
  Field f;
  f.components = comps;
  f.profile = TimeProfile{Profile::eigenmode};
  f.terms.push_back({[A, b](const Vec3& x) { return V3(A * x + b); }, 0, 1.0});
  return f;
}

// L2 distance between a broken k-cochain and a field, by quadrature
double l2_error(int k, const Eigen::VectorXd& x, const Field& v, const Mesh& m, double t) {
  const int N = num_local_dofs(k);
  const auto& q = tet_rule();
  double s = 0;
  for (int c = 0; c < m.num_cells(); ++c) {
    CellGeometry g = cell_geometry(m, c);
    for (std::size_t i = 0; i < q.weight.size(); ++i) {
      Eigen::MatrixXd B = eval_basis(k, g, q.bary[i]);
      Eigen::VectorXd uh = B.transpose() * x.segment(c * N, N);
      Eigen::VectorXd ue = v(g.point(q.bary[i]), t).head(B.cols());
      s += q.weight[i] * 6 * g.volume * (uh - ue).squaredNorm();
    }
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("time profiles") {
  TimeProfile e{Profile::eigenmode}, q{Profile::quadratic};
  const double w = std::sqrt(3.0);
  for (double t : {0.0, 0.3, 1.7}) {
    CHECK(e(0, t) == doctest::Approx(std::sin(w * t) + std::cos(w * t)).epsilon(1e-14));
    CHECK(e(1, t) == doctest::Approx(w * (std::cos(w * t) - std::sin(w * t))).epsilon(1e-14));
    CHECK(e(2, t) == doctest::Approx(-3 * e(0, t)).epsilon(1e-14));
    CHECK(e(3, t) == doctest::Approx(-3 * e(1, t)).epsilon(1e-14));
    CHECK(q(0, t) == doctest::Approx(t * t / 2));
    CHECK(q(1, t) == doctest::Approx(t));
    CHECK(q(2, t) == 1.0);
    CHECK(q(3, t) == 0.0);
  }
}

TEST_CASE("wave manufactured solution") {
  auto mc = wave_case(Profile::eigenmode);
  const double pi = std::acos(-1.0);
  CHECK(mc.alpha(Vec3(pi / 2, pi / 2, pi / 2), 0.0)[0] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK_FALSE(mc.forced());
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (Profile pr : {Profile::eigenmode, Profile::quadratic})
    for (double c : {1.0, 0.7}) {
      auto w = wave_case(pr, c);
      for (int i = 0; i < 10; ++i) {
        Vec3 x(u(rng), u(rng), u(rng));
        double t = u(rng);
        // c^-2 p_t + div sigma = xi
        double r = fd_dt(w.alpha, x, t)[0] / (c * c) + fd_div(w.beta, x, t) - w.source(x, t)[0];
        CHECK(std::abs(r) <= 1e-10);
        // sigma_t + grad p = 0
        CHECK((fd_dt(w.beta, x, t) + fd_grad(w.alpha, x, t)).norm() <= 1e-10);
        // derivative proxies
        CHECK((w.d_alpha[0](x, t) - fd_grad(w.alpha, x, t)).norm() <= 1e-10);
        CHECK(std::abs(w.d_beta[2](x, t)[0] - fd_div(w.beta, x, t)) <= 1e-10);
        CHECK(fd_curl(w.beta, x, t).norm() <= 1e-10);
      }
    }
  auto q = wave_case(Profile::quadratic);
  CHECK(q.forced());
  CHECK(q.alpha(Vec3(0.3, 0.2, 0.9), 0.0).norm() == 0.0);
  CHECK(q.beta(Vec3(0.3, 0.2, 0.9), 0.0).norm() == 0.0);
}

TEST_CASE("Maxwell manufactured solution") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (Profile pr : {Profile::eigenmode, Profile::quadratic})
    for (auto em : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}, std::pair{1.5, 0.8}}) {
      auto m = maxwell_case(pr, em.first, em.second);
      for (int i = 0; i < 10; ++i) {
        Vec3 x(u(rng), u(rng), u(rng));
        double t = u(rng);
        V3 r1 = em.first * fd_dt(m.alpha, x, t) - fd_curl(m.beta, x, t) - m.source(x, t);
        CHECK(r1.norm() <= 1e-10);
        V3 r2 = em.second * fd_dt(m.beta, x, t) + fd_curl(m.alpha, x, t);
        CHECK(r2.norm() <= 1e-10);
        CHECK(std::abs(fd_div(m.alpha, x, t)) <= 1e-10);
        CHECK(std::abs(fd_div(m.beta, x, t)) <= 1e-10);
        CHECK((m.d_alpha[1](x, t) - fd_curl(m.alpha, x, t)).norm() <= 1e-10);
        CHECK((m.d_beta[1](x, t) - fd_curl(m.beta, x, t)).norm() <= 1e-10);
      }
    }
  CHECK_FALSE(maxwell_case(Profile::eigenmode).forced());
  CHECK(maxwell_case(Profile::eigenmode, 2.0, 1.0).forced());
}

TEST_CASE("interpolation of fields inside the space is exact, and projection reproduces it") {
  Mesh m = build_structured_box(2, Box{Vec3(0, 0, 0), Vec3(1, 1.5, 0.8)});
  Eigen::Matrix3d A;
  A << 1, 2, -1, 0.5, 0, 3, -2, 1, 1;
  // linear scalar, constant vectors (contained in the lowest order spaces),
  // and the Whitney-type fields a + b x x, a + c x
  Field lin = affine(1, A, V3(0.3, 0, 0));
  Eigen::Matrix3d skew;
  skew << 0, -0.4, 0.7, 0.4, 0, -1.1, -0.7, 1.1, 0;
  Field ned = affine(3, skew, V3(1, -2, 0.5));
  Field rt = affine(3, 0.8 * Eigen::Matrix3d::Identity(), V3(-1, 0.2, 2));
  Field cst = constant(1, V3(2.5, 0, 0));
  const Field* fields[4] = {&lin, &ned, &rt, &cst};
  for (int k = 0; k < 4; ++k) {
    CAPTURE(k);
    Eigen::VectorXd I = interpolate_broken(k, *fields[k], m, 0.0);
    CHECK(l2_error(k, I, *fields[k], m, 0.0) < 1e-12);
    Eigen::VectorXd P = project_broken(k, *fields[k], m, 0.0);
    CHECK((P - I).norm() < 1e-11 * std::max(1.0, I.norm()));
    if (k < 3) {
      Eigen::VectorXd Ic = interpolate(k, *fields[k], m, 0.0);
      Eigen::VectorXd Pc = project_conforming(k, *fields[k], m, 0.0);
      CHECK((Pc - Ic).norm() < 1e-11 * std::max(1.0, Ic.norm()));
    }
  }
}

TEST_CASE("constrained conforming projection keeps the fixed DOFs") {
  Mesh m = build_structured_box(2);
  auto mc = wave_case(Profile::eigenmode);
  std::vector<int> fixed = {0, 3, 7};
  Eigen::VectorXd vals(3);
  vals << 1.0, -2.0, 0.5;
  Eigen::VectorXd x = project_conforming(0, mc.alpha, m, 0.2, fixed, vals);
  for (int i = 0; i < 3; ++i) CHECK(x[fixed[i]] == vals[i]);
}

TEST_CASE("projected eigenmode pressure converges") {
  auto mc = wave_case(Profile::eigenmode);
  double e[2];
  int i = 0;
  for (int n : {2, 4}) {
    Mesh m = build_structured_box(n);
    e[i++] = l2_error(3, project_broken(3, mc.alpha, m, 0.0), mc.alpha, m, 0.0);
  }
  CHECK(e[0] / e[1] > 1.8);
}

TEST_CASE("quadratic profile starts from zero data") {
  Mesh m = build_structured_box(2);
  auto bp = tag_boundary(m, gamma1_predicate("lower"));
  for (auto mc : {wave_case(Profile::quadratic), maxwell_case(Profile::quadratic)})
    for (Formulation f : {Formulation::primal, Formulation::dual}) {
      CaseDriver drv(mc, f, m, bp);
      auto s = build_hybrid(f, mc.p, m, bp, mc.weights());
      PhState x = drv.hybrid_initial(s, 0.0);
      CHECK(x.xl.head(s.na + s.nb).norm() == 0.0);
      CHECK(energy(s.E, x.xl) == 0.0);
    }
}

TEST_CASE("boundary inputs") {
  const double pi = std::acos(-1.0);
  Box box{Vec3(0, 0, 0), Vec3(pi, pi, pi)};
  Mesh m = build_structured_box(2, box);
  auto bp = tag_boundary(m, gamma1_predicate("lower", box));
  auto mc = wave_case(Profile::eigenmode);
  // pressure vanishes on every face of [0, pi]^3
  auto ents = closure_entities(0, m, bp.gamma1_faces);
  CHECK(input_u1(mc, m, 0.4, ents).cwiseAbs().maxCoeff() < 1e-15);
  // periodic in time
  Mesh u = build_structured_box(2);
  auto bu = tag_boundary(u, gamma1_predicate("lower"));
  const double T = 2 * pi / std::sqrt(3.0);
  for (auto c : {wave_case(Profile::eigenmode), maxwell_case(Profile::eigenmode)})
    for (Formulation f : {Formulation::primal, Formulation::dual}) {
      CaseDriver d(c, f, u, bu);
      CHECK((d.ul(0.3) - d.ul(0.3 + T)).norm() < 1e-12);
      CHECK((d.ug(0.3) - d.ug(0.3 + T)).norm() < 1e-12);
    }
  // u2 on boundary faces is the outward flux of -sigma for the wave
  auto faces = bu.gamma2_faces;
  Eigen::VectorXd u2 = input_u2(mc, u, 0.5, faces);
  for (std::size_t i = 0; i < faces.size(); ++i) {
    int f = faces[i];
    Vec3 n = u.face_normal(f) * u.boundary_face_sign(f);
    Vec3 xc = u.face_center(f);
    // one-point estimate of -int sigma . n_out, O(h^2) off
    double est = -mc.beta(xc, 0.5).dot(n) * u.area[f];
    CHECK(std::abs(u2[i] - est) < 0.02);
  }
}

TEST_CASE("initial data match the essential inputs") {
  Mesh m = build_structured_box(2);
  auto bp = tag_boundary(m, gamma1_predicate("lower"));
  for (auto mc : {wave_case(Profile::eigenmode), maxwell_case(Profile::eigenmode)})
    for (Formulation f : {Formulation::primal, Formulation::dual}) {
      CaseDriver d(mc, f, m, bp);
      auto ms = build_mixed_reference(f, mc.p, m, bp, mc.weights());
      Eigen::VectorXd x = d.mixed_initial_state(ms, 0.1);
      Eigen::VectorXd ess = ms.Ress * d.ul(0.1);
      for (std::size_t i = 0; i < ms.essential.size(); ++i) CHECK(x[ms.essential[i]] == doctest::Approx(ess[i]).epsilon(1e-14));
      // hybrid state is the broken copy of the mixed one
      CHECK((d.hybrid_initial_state(0.1) - d.conforming_to_broken(x)).norm() == 0.0);
    }
}
