#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kinap {

/// Symmetric velocity mesh of [-v_star, v_star] with 2L primal cells.
///
/// Cells are stored with array index a = j + L - 1 for j in {-L+1, ..., L},
/// interfaces v_{j+1/2} with index d = j + L for j in {-L, ..., L}. The dual
/// cell (v_j, v_{j+1}) shares the index d of the interface it contains, with
/// v_{-L} = -v_star and v_{L+1} = v_star.
///
/// Every quantity is built on the nonnegative half and mirrored, so
/// antisymmetry of centers/interfaces and symmetry of widths hold bit-exactly.
class VelocityMesh {
public:
  /// Uniform mesh with widths v_star / L.
  static VelocityMesh uniform(double v_star, int L);

  /// Mesh from an explicit interface list (2L + 1 increasing values). The
  /// list must be antisymmetric about its middle entry, which must be zero;
  /// the nonnegative half is taken as authoritative and mirrored.
  static VelocityMesh from_interfaces(std::span<const double> interfaces);

  double v_star() const { return v_star_; }
  int half_cells() const { return L_; }
  std::size_t size() const { return centers_.size(); }
  std::size_t interface_count() const { return interfaces_.size(); }

  double center(std::size_t a) const { return centers_[a]; }
  double width(std::size_t a) const { return widths_[a]; }
  double interface(std::size_t d) const { return interfaces_[d]; }
  double dual_width(std::size_t d) const { return dual_widths_[d]; }

  std::span<const double> centers() const { return centers_; }
  std::span<const double> widths() const { return widths_; }
  std::span<const double> interfaces() const { return interfaces_; }
  std::span<const double> dual_widths() const { return dual_widths_; }

  /// Array index of the mirrored cell (j -> -j + 1).
  std::size_t mirror(std::size_t a) const { return size() - 1 - a; }

  bool operator==(const VelocityMesh&) const = default;

private:
  VelocityMesh(double v_star, int L, std::vector<double> positive_interfaces);

  double v_star_ = 0.0;
  int L_ = 0;
  std::vector<double> interfaces_;
  std::vector<double> centers_;
  std::vector<double> widths_;
  std::vector<double> dual_widths_;
};

/// Periodic mesh of the torus [0, R) with an odd number N of cells.
class SpatialMesh {
public:
  static SpatialMesh uniform(double R, int N);

  /// Nonuniform periodic mesh; R is the sum of the widths.
  static SpatialMesh from_widths(std::span<const double> widths);

  double length() const { return R_; }
  std::size_t size() const { return widths_.size(); }
  double center(std::size_t i) const { return centers_[i]; }
  double width(std::size_t i) const { return widths_[i]; }
  std::span<const double> centers() const { return centers_; }
  std::span<const double> widths() const { return widths_; }

  std::size_t next(std::size_t i) const { return i + 1 == size() ? 0 : i + 1; }
  std::size_t prev(std::size_t i) const { return i == 0 ? size() - 1 : i - 1; }

  bool is_uniform() const;

  bool operator==(const SpatialMesh&) const = default;

private:
  explicit SpatialMesh(std::vector<double> widths);

  double R_ = 0.0;
  std::vector<double> widths_;
  std::vector<double> centers_;
};

struct PhaseMesh {
  SpatialMesh x;
  VelocityMesh v;

  std::size_t nx() const { return x.size(); }
  std::size_t nv() const { return v.size(); }
  std::size_t cells() const { return nx() * nv(); }
};

}  // namespace kinap
