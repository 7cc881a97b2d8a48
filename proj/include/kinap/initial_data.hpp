#pragma once

#include <cstdint>
#include <string>

#include "kinap/equilibrium.hpp"
#include "kinap/mesh.hpp"
#include "kinap/scheme.hpp"

namespace kinap {

enum class InitialKind {
  FarEquilibrium,    // v^4 exp(-v^2/2) / sqrt(2 pi) * (1 + cos(4 pi x / R)) / 2
  CloseEquilibrium,  // (1 + cos(2 pi x / R)) M_j
  RandomUniform,     // independent U[0, 1) cell values
  RandomTruncated,   // U[0, 1) for |v_j| <= truncation, zero elsewhere
  Ball,              // indicator of (x - R/2)^2 / 0.04 + v^2 / 4 <= 1
  Equilibrium,       // M_j
  File               // whitespace-separated N x 2L values, row-major in x
};

std::string to_string(InitialKind kind);
InitialKind initial_kind_from_string(const std::string& name);

struct InitialData {
  InitialKind kind = InitialKind::FarEquilibrium;
  double truncation = 3.0;
  std::string path;
};

/// Midpoint values at (x_i, v_j). Random kinds draw from a 64-bit Mersenne
/// twister seeded with `seed`, converted to doubles with 53 random bits, in
/// row-major cell order, so equal seeds give identical fields on every
/// platform.
CellDistribution generate_initial(const InitialData& init, const PhaseMesh& mesh,
                                  const DiscreteMaxwellian& M, std::uint64_t seed);

}  // namespace kinap
