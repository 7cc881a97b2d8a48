#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "kinap/scheme.hpp"
#include "test_support.hpp"

using namespace kinap;

namespace {

PhaseMesh reference_mesh() { return {SpatialMesh::uniform(1.0, 51), VelocityMesh::uniform(8.0, 20)}; }

DiscreteMaxwellian maxwellian_for(Collision c, const VelocityMesh& v) {
  return c == Collision::FokkerPlanck ? gaussian_fp(v) : gaussian_bgk(v);
}

CellDistribution equilibrium(const PhaseMesh& mesh, const DiscreteMaxwellian& M, double mu) {
  CellDistribution f(mesh.nx(), mesh.nv());
  for (std::size_t i = 0; i < mesh.nx(); ++i)
    for (std::size_t a = 0; a < mesh.nv(); ++a) f(i, a) = mu * M.cell(a);
  return f;
}

double relative_gap(const CellDistribution& a, const CellDistribution& b) {
  return test::max_abs_diff(a.values, b.values) / test::max_abs(b.values);
}

}  // namespace

TEST_CASE("global equilibrium decomposes to the zero state") {
  const auto mesh = reference_mesh();
  const auto M = gaussian_fp(mesh.v);
  const auto s = decompose(equilibrium(mesh, M, 1.7), mesh, M, 0.5);
  CHECK(s.mu == doctest::Approx(1.7));
  CHECK(test::max_abs(s.lambda) <= 1e-14);
  CHECK(test::max_abs(s.h) <= 1e-13);
}

TEST_CASE("local equilibrium has no micro part") {
  const auto mesh = reference_mesh();
  const auto M = gaussian_bgk(mesh.v);
  CellDistribution f(mesh.nx(), mesh.nv());
  for (std::size_t i = 0; i < mesh.nx(); ++i)
    for (std::size_t a = 0; a < mesh.nv(); ++a)
      f(i, a) = (1.0 + std::cos(2.0 * std::numbers::pi * mesh.x.center(i))) * M.cell(a);
  const auto s = decompose(f, mesh, M, 1.0);
  CHECK(s.mu == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 0; i < mesh.nx(); ++i) {
    CHECK(s.lambda[i] ==
          doctest::Approx(std::cos(2.0 * std::numbers::pi * mesh.x.center(i))).scale(1.0).epsilon(1e-14));
  }
  CHECK(test::max_abs(s.h) <= 1e-13);
}

TEST_CASE("decompose and reconstruct are inverse") {
  const auto mesh = reference_mesh();
  const auto M = gaussian_fp(mesh.v);
  const auto f = test::random_distribution(mesh, 42);
  const auto s = decompose(f, mesh, M, 0.5);
  const auto g = reconstruct(s, M, 0.5);
  CHECK(relative_gap(g, f) <= 1e-12);

  double mean = 0.0;
  for (std::size_t i = 0; i < mesh.nx(); ++i) mean += mesh.x.width(i) * s.lambda[i];
  CHECK(std::abs(mean) <= 1e-15);
  for (std::size_t i = 0; i < mesh.nx(); ++i) {
    double defect = 0.0;
    for (std::size_t a = 0; a < mesh.nv(); ++a) defect += mesh.v.width(a) * M.cell(a) * s.h[i * mesh.nv() + a];
    CHECK(std::abs(defect) <= 1e-12);
  }
  CHECK_THROWS_AS(decompose(f, mesh, M, 0.0), std::invalid_argument);
}

TEST_CASE("initial states") {
  const auto mesh = reference_mesh();
  const auto M = gaussian_fp(mesh.v);
  const auto f = test::random_distribution(mesh, 3);

  SchemeConfig cfg;
  cfg.epsilon = 0.0;
  const auto s0 = init_state(f, mesh, M, cfg);
  CHECK(test::max_abs(s0.h) == 0.0);
  CHECK(s0.h.size() == mesh.cells());

  cfg.epsilon = 1.0;
  const auto s1 = init_state(equilibrium(mesh, M, 1.0), mesh, M, cfg);
  CHECK(test::max_abs(s1.lambda) <= 1e-14);
  CHECK(test::max_abs(s1.h) <= 1e-13);

  cfg.epsilon = 0.1;
  CellDistribution far(mesh.nx(), mesh.nv());
  for (std::size_t i = 0; i < mesh.nx(); ++i)
    for (std::size_t a = 0; a < mesh.nv(); ++a) {
      const double v = mesh.v.center(a);
      far(i, a) = std::pow(v, 4) * std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi) *
                  (1.0 + std::cos(4.0 * std::numbers::pi * mesh.x.center(i))) / 2.0;
    }
  const auto s2 = init_state(far, mesh, M, cfg);
  double mean = 0.0;
  for (std::size_t i = 0; i < mesh.nx(); ++i) mean += mesh.x.width(i) * s2.lambda[i];
  CHECK(std::abs(mean) <= 1e-15);
}

TEST_CASE("reconstruction of simple states") {
  const auto mesh = reference_mesh();
  const auto M = gaussian_bgk(mesh.v);
  MicroMacroState s;
  s.mu = 1.0;
  s.lambda.assign(mesh.nx(), 0.0);
  s.h.assign(mesh.cells(), 0.0);
  const auto f = reconstruct(s, M, 1.0);
  for (std::size_t i = 0; i < mesh.nx(); ++i)
    for (std::size_t a = 0; a < mesh.nv(); ++a) CHECK(f(i, a) == M.cell(a));

  s.lambda = test::uniform_values(mesh.nx(), 1, -0.5, 0.5);
  s.h = test::uniform_values(mesh.cells(), 2, -1.0, 1.0);
  const auto g = reconstruct(s, M, 0.0);
  for (std::size_t i = 0; i < mesh.nx(); ++i)
    for (std::size_t a = 0; a < mesh.nv(); ++a) CHECK(g(i, a) == (1.0 + s.lambda[i]) * M.cell(a));
}

TEST_CASE("matrix entries on a three-cell torus") {
  const PhaseMesh mesh{SpatialMesh::uniform(1.0, 3), VelocityMesh::uniform(1.0, 1)};
  const auto M = gaussian_bgk(mesh.v);
  REQUIRE(M.cell(0) == doctest::Approx(0.5));
  SchemeConfig cfg;
  cfg.epsilon = 1.0;
  cfg.dt = 0.1;
  cfg.collision = Collision::BGK;
  const SchemeSystem sys(cfg, mesh, M);
  const auto& A = sys.matrix();
  // v_j M_j dv_j dt / (2 dx) = (+-0.5)(0.5)(1)(0.1) / (2/3)
  CHECK(A.at(sys.lambda_index(0), sys.h_index(1, 1)) == doctest::Approx(0.0375).epsilon(1e-14));
  CHECK(A.at(sys.lambda_index(0), sys.h_index(1, 0)) == doctest::Approx(-0.0375).epsilon(1e-14));
  CHECK(A.at(sys.lambda_index(0), sys.h_index(2, 1)) == doctest::Approx(-0.0375).epsilon(1e-14));
  CHECK(A.at(sys.lambda_index(0), sys.lambda_index(0)) == 1.0);
  CHECK(A.rows() == 3 + 6 + 3);
  CHECK(A.cols() == 3 + 6);
  CHECK(sys.rhs_scaling()[sys.lambda_index(2)] == 1.0);
  CHECK(sys.rhs_scaling()[sys.h_index(1, 0)] == 1.0);
  CHECK(sys.rhs_scaling()[sys.constraint_row(0)] == 0.0);
}

TEST_CASE("vanishing epsilon leaves dt on the BGK micro diagonal") {
  const auto mesh = reference_mesh();
  const auto M = gaussian_bgk(mesh.v);
  SchemeConfig cfg;
  cfg.epsilon = 0.0;
  cfg.collision = Collision::BGK;
  const SchemeSystem sys(cfg, mesh, M);
  for (std::size_t i : {0u, 25u, 50u})
    for (std::size_t a : {0u, 19u, 39u}) CHECK(sys.matrix().at(sys.h_index(i, a), sys.h_index(i, a)) == cfg.dt);
  for (std::size_t i = 0; i < mesh.nx(); ++i) CHECK(sys.rhs_scaling()[sys.h_index(i, 3)] == 0.0);
}

TEST_CASE("constraint rows carry M_j dv_j on the 2L unknowns of their cell") {
  const auto mesh = reference_mesh();
  const auto M = gaussian_fp(mesh.v);
  SchemeConfig cfg;
  const SchemeSystem sys(cfg, mesh, M);
  for (std::size_t i : {0u, 13u, 50u}) {
    const auto cols = sys.matrix().row_cols(sys.constraint_row(i));
    const auto vals = sys.matrix().row_values(sys.constraint_row(i));
    REQUIRE(cols.size() == 40);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      CHECK(cols[k] == sys.h_index(i, k));
      CHECK(vals[k] == doctest::Approx(M.cell(k) * mesh.v.width(k)).epsilon(1e-15));
    }
  }
}

TEST_CASE("equilibrium is a fixed point of every formulation") {
  const auto mesh = reference_mesh();
  for (Collision c : {Collision::FokkerPlanck, Collision::BGK}) {
    const auto M = maxwellian_for(c, mesh.v);
    const auto f = equilibrium(mesh, M, 1.0);
    for (Formulation form : {Formulation::MicroMacro, Formulation::OverdeterminedMicroMacro}) {
      SchemeConfig cfg{0.3, 0.1, c, form};
      const SchemeSystem sys(cfg, mesh, M);
      const auto s = sys.step(init_state(f, mesh, M, cfg));
      CHECK(relative_gap(reconstruct(s, M, cfg.epsilon), f) <= 1e-13);
    }
    SchemeConfig direct{0.3, 0.1, c, Formulation::Direct};
    CHECK(relative_gap(step_direct(direct, mesh, M, f), f) <= 1e-13);
  }
}

TEST_CASE("vanishing epsilon reproduces the heat scheme") {
  const auto mesh = reference_mesh();
  for (Collision c : {Collision::FokkerPlanck, Collision::BGK}) {
    const auto M = maxwellian_for(c, mesh.v);
    SchemeConfig cfg{0.0, 0.1, c, Formulation::OverdeterminedMicroMacro};
    const SchemeSystem sys(cfg, mesh, M);
    const HeatScheme heat(mesh.x, M.m2(), cfg.dt);
    auto s = init_state(test::random_distribution(mesh, 9), mesh, M, cfg);
    for (int n = 0; n < 5; ++n) {
      const auto expected = heat.step(s.lambda);
      s = sys.step(s);
      CHECK(test::max_abs_diff(s.lambda, expected) <= 1e-12 * test::max_abs(expected));
    }
  }
}

TEST_CASE("space-homogeneous BGK relaxes in closed form") {
  const auto mesh = reference_mesh();
  const auto M = gaussian_bgk(mesh.v);
  CellDistribution f(mesh.nx(), mesh.nv());
  const auto profile = test::uniform_values(mesh.nv(), 4);
  for (std::size_t i = 0; i < mesh.nx(); ++i)
    for (std::size_t a = 0; a < mesh.nv(); ++a) f(i, a) = profile[a];
  SchemeConfig cfg{1.0, 0.1, Collision::BGK, Formulation::OverdeterminedMicroMacro};
  const SchemeSystem sys(cfg, mesh, M);
  const auto g = reconstruct(sys.step(init_state(f, mesh, M, cfg)), M, 1.0);
  const auto rho = density(f, mesh.v);
  CellDistribution expected(mesh.nx(), mesh.nv());
  for (std::size_t i = 0; i < mesh.nx(); ++i)
    for (std::size_t a = 0; a < mesh.nv(); ++a)
      expected(i, a) = (f(i, a) + cfg.dt * rho[i] * M.cell(a)) / (1.0 + cfg.dt);
  CHECK(relative_gap(g, expected) <= 1e-12);
}

TEST_CASE("direct and micro-macro trajectories coincide on a small mesh") {
  const PhaseMesh mesh{SpatialMesh::uniform(1.0, 5), VelocityMesh::uniform(8.0, 2)};
  for (Collision c : {Collision::FokkerPlanck, Collision::BGK}) {
    const auto M = maxwellian_for(c, mesh.v);
    SchemeConfig cfg{1.0, 0.1, c, Formulation::OverdeterminedMicroMacro};
    const SchemeSystem over(cfg, mesh, M);
    SchemeConfig square_cfg = cfg;
    square_cfg.formulation = Formulation::MicroMacro;
    const SchemeSystem square(square_cfg, mesh, M);
    SchemeConfig direct_cfg = cfg;
    direct_cfg.formulation = Formulation::Direct;
    const DirectScheme direct(direct_cfg, mesh, M);

    auto f = test::random_distribution(mesh, 5);
    auto s = init_state(f, mesh, M, cfg);
    auto q = s;
    const double mass0 = total_mass(f, mesh);
    for (int n = 0; n < 10; ++n) {
      f = direct.step(f);
      s = over.step(s);
      q = square.step(q);
      const auto g = reconstruct(s, M, 1.0);
      CHECK(relative_gap(f, g) <= 1e-10);
      CHECK(relative_gap(reconstruct(q, M, 1.0), g) <= 1e-10);
      CHECK(std::abs(total_mass(f, mesh) - mass0) <= 1e-12 * mass0);
    }
  }
}

TEST_CASE("ill-posed configurations are rejected") {
  const auto mesh = reference_mesh();
  const auto fp = gaussian_fp(mesh.v);
  const auto bgk = gaussian_bgk(mesh.v);
  CHECK_THROWS_AS((SchemeConfig{0.0, 0.1, Collision::BGK, Formulation::Direct}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((SchemeConfig{0.0, 0.1, Collision::FokkerPlanck, Formulation::MicroMacro}.validate()),
                  std::invalid_argument);
  CHECK_NOTHROW((SchemeConfig{0.0, 0.1, Collision::BGK, Formulation::MicroMacro}.validate()));
  CHECK_THROWS_AS((SchemeConfig{1.0, 0.0, Collision::BGK, Formulation::MicroMacro}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((SchemeSystem(SchemeConfig{1.0, 0.1, Collision::FokkerPlanck}, mesh, bgk)),
                  std::invalid_argument);
  CHECK_THROWS_AS(formulation_from_string("spectral"), std::invalid_argument);
  CHECK(formulation_from_string(to_string(Formulation::Direct)) == Formulation::Direct);
  (void)fp;
}
