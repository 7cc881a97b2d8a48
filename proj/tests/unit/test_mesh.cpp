#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinap/mesh.hpp"

using kinap::SpatialMesh;
using kinap::VelocityMesh;

TEST_CASE("uniform velocity mesh with 40 cells on [-8, 8]") {
  const auto v = VelocityMesh::uniform(8.0, 20);
  CHECK(v.size() == 40);
  CHECK(v.interface_count() == 41);
  for (std::size_t a = 0; a < v.size(); ++a) CHECK(v.width(a) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(v.interface(20) == 0.0);
  CHECK(v.center(39) == doctest::Approx(7.8).epsilon(1e-15));
  CHECK(v.interface(0) == -8.0);
  CHECK(v.interface(40) == 8.0);
}

TEST_CASE("two-cell velocity mesh") {
  const auto v = VelocityMesh::uniform(1.0, 1);
  REQUIRE(v.size() == 2);
  CHECK(v.interface(0) == -1.0);
  CHECK(v.interface(1) == 0.0);
  CHECK(v.interface(2) == 1.0);
  CHECK(v.center(0) == -0.5);
  CHECK(v.center(1) == 0.5);
}

TEST_CASE("velocity centers and interfaces are exactly antisymmetric") {
  for (int L : {1, 3, 20, 35}) {
    const auto v = VelocityMesh::uniform(8.0, L);
    for (std::size_t a = 0; a < v.size(); ++a) {
      CHECK(v.center(a) == -v.center(v.mirror(a)));
      CHECK(v.width(a) == v.width(v.mirror(a)));
      CHECK(v.center(a) != 0.0);
    }
    const std::size_t n = v.interface_count();
    for (std::size_t d = 0; d < n; ++d) CHECK(v.interface(d) == -v.interface(n - 1 - d));
  }
}

TEST_CASE("dual cells span neighbouring centers and the box ends") {
  const auto v = VelocityMesh::uniform(8.0, 20);
  CHECK(v.dual_width(0) == doctest::Approx(0.2));
  CHECK(v.dual_width(40) == doctest::Approx(0.2));
  for (std::size_t d = 1; d < 40; ++d) {
    CHECK(v.dual_width(d) == doctest::Approx(v.center(d) - v.center(d - 1)));
  }
  double total = 0.0;
  for (double w : v.dual_widths()) total += w;
  CHECK(total == doctest::Approx(16.0));
}

TEST_CASE("nonuniform velocity mesh is mirrored from the positive half") {
  const std::vector<double> iface{-3.0, -1.0, -0.25, 0.0, 0.25, 1.0, 3.0};
  const auto v = VelocityMesh::from_interfaces(iface);
  CHECK(v.size() == 6);
  CHECK(v.v_star() == 3.0);
  CHECK(v.center(3) == 0.125);
  CHECK(v.center(2) == -0.125);
  CHECK(v.width(5) == 2.0);
  CHECK(v.width(0) == 2.0);
}

TEST_CASE("invalid velocity meshes are rejected") {
  CHECK_THROWS_AS(VelocityMesh::uniform(8.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(VelocityMesh::uniform(0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(VelocityMesh::uniform(-1.0, 3), std::invalid_argument);
  const std::vector<double> no_zero{-1.0, -0.5, 0.1, 1.0};
  CHECK_THROWS_AS(VelocityMesh::from_interfaces(no_zero), std::invalid_argument);
  const std::vector<double> decreasing{-1.0, 0.0, -0.5};
  CHECK_THROWS_AS(VelocityMesh::from_interfaces(decreasing), std::invalid_argument);
}

TEST_CASE("torus of length 1 with 51 cells") {
  const auto x = SpatialMesh::uniform(1.0, 51);
  CHECK(x.size() == 51);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x.width(i) == doctest::Approx(1.0 / 51.0).epsilon(1e-15));
    CHECK(x.center(i) == doctest::Approx((i + 0.5) / 51.0));
  }
  CHECK(x.length() == 1.0);
  CHECK(x.is_uniform());
  CHECK(x.next(50) == 0);
  CHECK(x.prev(0) == 50);
}

TEST_CASE("single-cell torus") {
  const auto x = SpatialMesh::uniform(1.0, 1);
  CHECK(x.size() == 1);
  CHECK(x.width(0) == 1.0);
  CHECK(x.next(0) == 0);
  CHECK(x.prev(0) == 0);
}

TEST_CASE("even cell counts are rejected with a reason") {
  try {
    (void)SpatialMesh::uniform(1.0, 50);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("Poisson") != std::string::npos);
  }
  CHECK_THROWS_AS(SpatialMesh::uniform(0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(SpatialMesh::uniform(1.0, 0), std::invalid_argument);
  const std::vector<double> even{0.5, 0.5};
  CHECK_THROWS_AS(SpatialMesh::from_widths(even), std::invalid_argument);
}

TEST_CASE("nonuniform torus sums its widths") {
  const std::vector<double> w{0.1, 0.2, 0.3, 0.15, 0.25};
  const auto x = SpatialMesh::from_widths(w);
  CHECK(x.length() == doctest::Approx(1.0));
  CHECK_FALSE(x.is_uniform());
  CHECK(x.center(0) == doctest::Approx(0.05));
  CHECK(x.center(2) == doctest::Approx(0.45));
}
