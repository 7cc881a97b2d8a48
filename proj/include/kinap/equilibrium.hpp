#pragma once

#include <span>
#include <string>
#include <vector>

#include "kinap/mesh.hpp"

namespace kinap {

enum class Collision { FokkerPlanck, BGK };

std::string to_string(Collision c);
Collision collision_from_string(const std::string& name);

/// Discrete Maxwellian on a velocity mesh.
///
/// Cell values M_j are positive, even (M_j = M_{-j+1}) and of unit discrete
/// mass. The Fokker-Planck kind additionally carries interface values
/// M*_{j+1/2}, vanishing at +-v_star, from which the cell values derive as
/// M_j = (M*_{j-1/2} - M*_{j+1/2}) / (v_j dv_j).
class DiscreteMaxwellian {
public:
  /// BGK Maxwellian from cell values. Values are rescaled to unit discrete
  /// mass, then positivity and even symmetry are checked.
  static DiscreteMaxwellian from_cells(const VelocityMesh& mesh, std::span<const double> cells);

  /// Fokker-Planck Maxwellian from interface values (2L + 1 entries, the two
  /// endpoints must be zero). The interface values are rescaled so that the
  /// derived cell values have unit mass; positivity of every cell value is
  /// verified.
  static DiscreteMaxwellian from_interfaces(const VelocityMesh& mesh,
                                            std::span<const double> interfaces);

  Collision kind() const { return kind_; }
  const VelocityMesh& mesh() const { return mesh_; }
  std::size_t size() const { return cells_.size(); }

  double cell(std::size_t a) const { return cells_[a]; }
  double gamma(std::size_t a) const { return gamma_[a]; }
  double interface(std::size_t d) const { return interfaces_[d]; }
  bool has_interfaces() const { return !interfaces_.empty(); }

  std::span<const double> cells() const { return cells_; }
  std::span<const double> gammas() const { return gamma_; }
  std::span<const double> interfaces() const { return interfaces_; }

  double m0() const { return m0_; }
  double m2() const { return m2_; }
  double m4() const { return m4_; }

private:
  DiscreteMaxwellian() = default;
  void finish();

  Collision kind_ = Collision::BGK;
  VelocityMesh mesh_ = VelocityMesh::uniform(1.0, 1);
  std::vector<double> cells_;
  std::vector<double> gamma_;
  std::vector<double> interfaces_;
  double m0_ = 0.0;
  double m2_ = 0.0;
  double m4_ = 0.0;
};

/// Normalised Gaussian sampled at cell centers.
DiscreteMaxwellian gaussian_bgk(const VelocityMesh& mesh);

/// Normalised Gaussian sampled at interior interfaces, zero at +-v_star.
DiscreteMaxwellian gaussian_fp(const VelocityMesh& mesh);

/// (cos(pi v) + 1.1) / (1 + 0.1 |v|^6) at cell centers, normalised.
DiscreteMaxwellian nongaussian_bgk(const VelocityMesh& mesh);

/// sum_j |v_j|^k M_j dv_j
double discrete_moment(const DiscreteMaxwellian& M, int k);

/// Reads one value per line ('#' comments and blank lines skipped). 2L
/// values are taken as BGK cell values, 2L + 1 as Fokker-Planck interface
/// values.
DiscreteMaxwellian load_maxwellian(const VelocityMesh& mesh, const std::string& path);

}  // namespace kinap
