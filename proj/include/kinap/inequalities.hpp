#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

#include "kinap/equilibrium.hpp"
#include "kinap/mesh.hpp"

namespace kinap {

struct PoincareReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;    // rhs - lhs
  double constant = 0.0;  // constant multiplying the right side
  double removed_mean = 0.0;
  bool projected = false; // true when a nonzero mean was removed first
};

/// Discrete Gaussian Poincare inequality for one velocity profile f:
///   ||f - rho M||_{2,gamma}^2 <= ||D_v (f / M)||_{2,M*}^2
/// Both sides are reported squared. Needs a Fokker-Planck Maxwellian.
PoincareReport verify_gaussian_poincare(std::span<const double> f, const DiscreteMaxwellian& M);

/// Discrete Poincare inequality on the torus:
///   ||phi||_2 <= C_P ||D_x phi||_2,  C_P = R / (N sin(pi / N)).
/// A nonzero weighted mean of phi is removed first and flagged.
PoincareReport verify_torus_poincare(std::span<const double> phi, const SpatialMesh& mesh);

/// Outcome of checking an inequality on many seeded random inputs.
struct InequalitySuiteReport {
  std::size_t samples = 0;
  std::size_t violations = 0;  // relative margin below -tolerance
  std::size_t projected = 0;
  double worst_relative_margin = std::numeric_limits<double>::infinity();
  /// rhs / lhs on the mode that attains the constant (torus only, else NaN).
  double extremal_ratio = std::numeric_limits<double>::quiet_NaN();
  /// rhs / lhs on the k = 1 cosine (torus only, else NaN).
  double k1_ratio = std::numeric_limits<double>::quiet_NaN();
};

/// Relative margin (rhs - lhs) / max(lhs, rhs); zero when both sides vanish.
double relative_margin(const PoincareReport& r);

/// Velocity profiles with entries uniform in [-1, 1).
InequalitySuiteReport gaussian_poincare_suite(const DiscreteMaxwellian& M, std::size_t samples,
                                              std::uint64_t seed, double tolerance = 1e-12);

/// Spatial fields with entries uniform in [-1, 1); means are projected out.
InequalitySuiteReport torus_poincare_suite(const SpatialMesh& mesh, std::size_t samples,
                                           std::uint64_t seed, double tolerance = 1e-12);

}  // namespace kinap
