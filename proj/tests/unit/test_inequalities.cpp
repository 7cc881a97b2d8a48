#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kinap/inequalities.hpp"
#include "test_support.hpp"

using namespace kinap;

TEST_CASE("Gaussian Poincare inequality is an equality at equilibrium") {
  const auto M = gaussian_fp(VelocityMesh::uniform(8.0, 20));
  std::vector<double> f(M.size());
  for (std::size_t a = 0; a < f.size(); ++a) f[a] = 2.5 * M.cell(a);
  const auto r = verify_gaussian_poincare(f, M);
  CHECK(std::abs(r.lhs) <= 1e-28);
  CHECK(std::abs(r.rhs) <= 1e-24);
}

TEST_CASE("Gaussian Poincare inequality for the first velocity moment") {
  const auto v = VelocityMesh::uniform(8.0, 20);
  const auto M = gaussian_fp(v);
  std::vector<double> f(M.size());
  for (std::size_t a = 0; a < f.size(); ++a) f[a] = v.center(a) * M.cell(a);
  const auto r = verify_gaussian_poincare(f, M);
  // rho = 0 and f / M = v, so the left side is m2 and the right side sums M* over interior interfaces.
  double rhs = 0.0;
  for (std::size_t d = 1; d + 1 < v.interface_count(); ++d) {
    const double g = (v.center(d) - v.center(d - 1)) / v.dual_width(d);
    rhs += g * g * M.interface(d) * v.dual_width(d);
  }
  CHECK(r.lhs == doctest::Approx(M.m2()).epsilon(1e-13));
  CHECK(r.rhs == doctest::Approx(rhs).epsilon(1e-13));
  CHECK(r.lhs > 0.0);
  CHECK(r.margin >= -1e-12 * r.rhs);
}

TEST_CASE("Gaussian Poincare inequality on seeded random profiles") {
  const auto M = gaussian_fp(VelocityMesh::uniform(8.0, 20));
  const auto report = gaussian_poincare_suite(M, 1000, 20240611);
  CHECK(report.samples == 1000);
  CHECK(report.violations == 0);
  CHECK(report.worst_relative_margin >= -1e-12);
  CHECK(std::isnan(report.extremal_ratio));
}

TEST_CASE("Gaussian Poincare inequality needs interface values") {
  const auto M = gaussian_bgk(VelocityMesh::uniform(8.0, 20));
  CHECK_THROWS_AS(verify_gaussian_poincare(std::vector<double>(40, 1.0), M), std::invalid_argument);
  const auto F = gaussian_fp(VelocityMesh::uniform(8.0, 20));
  CHECK_THROWS_AS(verify_gaussian_poincare(std::vector<double>(39, 1.0), F), std::invalid_argument);
}

TEST_CASE("torus Poincare inequality for the zero field") {
  const auto r = verify_torus_poincare(std::vector<double>(51, 0.0), SpatialMesh::uniform(1.0, 51));
  CHECK(r.lhs == 0.0);
  CHECK(r.rhs == 0.0);
  CHECK_FALSE(r.projected);
}

TEST_CASE("torus Poincare inequality on three cells by hand") {
  // dx = 1/3, D_x phi = (-3/2, -3/2, 3), ||phi|| = sqrt(2/3), C_P = 2 / (3 sqrt 3).
  const std::vector<double> phi{1.0, -1.0, 0.0};
  const auto r = verify_torus_poincare(phi, SpatialMesh::uniform(1.0, 3));
  CHECK(r.constant == doctest::Approx(2.0 / (3.0 * std::sqrt(3.0))));
  CHECK(r.lhs == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  CHECK(r.rhs == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  CHECK_FALSE(r.projected);
}

TEST_CASE("torus Poincare inequality for Fourier modes") {
  const auto x = SpatialMesh::uniform(1.0, 51);
  auto mode = [&](int k) {
    std::vector<double> phi(51);
    for (std::size_t i = 0; i < 51; ++i) phi[i] = std::cos(2.0 * std::numbers::pi * k * x.center(i));
    return verify_torus_poincare(phi, x);
  };
  const auto k1 = mode(1);
  CHECK(k1.margin >= 0.0);
  CHECK(k1.rhs / k1.lhs == doctest::Approx(2.0 * std::cos(std::numbers::pi / 51.0)).epsilon(1e-12));
  const auto kx = mode(25);
  CHECK(kx.margin >= -1e-12 * kx.rhs);
  CHECK(kx.rhs / kx.lhs <= 1.0 + 1e-9);
}

TEST_CASE("torus Poincare inequality projects out the mean") {
  const auto x = SpatialMesh::uniform(1.0, 5);
  const std::vector<double> phi{2.0, 1.0, 1.0, 1.0, 1.0};
  const auto r = verify_torus_poincare(phi, x);
  CHECK(r.projected);
  CHECK(r.removed_mean == doctest::Approx(1.2));
  CHECK(r.margin >= 0.0);
  CHECK_THROWS_AS(verify_torus_poincare(std::vector<double>(4, 0.0), x), std::invalid_argument);
}

TEST_CASE("torus Poincare inequality on seeded random fields") {
  for (double R : {1.0, std::numbers::pi}) {
    const auto x = SpatialMesh::uniform(R, 51);
    const auto report = torus_poincare_suite(x, 1000, 7);
    CHECK(report.violations == 0);
    CHECK(report.projected == 1000);
    CHECK(report.worst_relative_margin >= -1e-12);
    CHECK(report.extremal_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.k1_ratio == doctest::Approx(2.0 * std::cos(std::numbers::pi / 51.0)).epsilon(1e-12));
  }
}

TEST_CASE("relative margin") {
  PoincareReport r;
  CHECK(relative_margin(r) == 0.0);
  r.lhs = 1.0;
  r.rhs = 2.0;
  r.margin = 1.0;
  CHECK(relative_margin(r) == 0.5);
}
