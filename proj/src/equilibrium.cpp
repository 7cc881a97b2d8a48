#include "kinap/equilibrium.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace kinap {

std::string to_string(Collision c) {
  return c == Collision::FokkerPlanck ? "fp" : "bgk";
}

Collision collision_from_string(const std::string& name) {
  if (name == "fp" || name == "fokker-planck" || name == "FokkerPlanck") {
    return Collision::FokkerPlanck;
  }
  if (name == "bgk" || name == "BGK") {
    return Collision::BGK;
  }
  throw std::invalid_argument("unknown collision operator '" + name + "' (expected fp or bgk)");
}

namespace {

constexpr double kMassTolerance = 1e-12;

double cell_mass(const VelocityMesh& mesh, std::span<const double> cells) {
  // Pairwise over mirrored cells so symmetric data sums symmetrically.
  double mass = 0.0;
  const std::size_t n = mesh.size();
  for (std::size_t a = n / 2; a < n; ++a) {
    mass += cells[a] * mesh.width(a) + cells[n - 1 - a] * mesh.width(n - 1 - a);
  }
  return mass;
}

std::vector<double> derive_cells(const VelocityMesh& mesh, std::span<const double> interfaces) {
  std::vector<double> cells(mesh.size());
  for (std::size_t a = 0; a < mesh.size(); ++a) {
    cells[a] = (interfaces[a] - interfaces[a + 1]) / (mesh.center(a) * mesh.width(a));
  }
  return cells;
}

void check_cells(const VelocityMesh& mesh, std::span<const double> cells) {
  for (std::size_t a = 0; a < cells.size(); ++a) {
    if (!(cells[a] > 0.0) || !std::isfinite(cells[a])) {
      throw std::invalid_argument("discrete Maxwellian: cell value " + std::to_string(a) +
                                  " is not positive (" + std::to_string(cells[a]) + ")");
    }
    const double mirrored = cells[mesh.mirror(a)];
    if (std::abs(cells[a] - mirrored) > 1e-12 * std::max(cells[a], mirrored)) {
      throw std::invalid_argument("discrete Maxwellian: cell values are not even in v");
    }
  }
}

}  // namespace

DiscreteMaxwellian DiscreteMaxwellian::from_cells(const VelocityMesh& mesh,
                                                  std::span<const double> cells) {
  if (cells.size() != mesh.size()) {
    throw std::invalid_argument("discrete Maxwellian: expected " + std::to_string(mesh.size()) +
                                " cell values, got " + std::to_string(cells.size()));
  }
  DiscreteMaxwellian M;
  M.kind_ = Collision::BGK;
  M.mesh_ = mesh;
  M.cells_.assign(cells.begin(), cells.end());
  check_cells(mesh, M.cells_);
  const double mass = cell_mass(mesh, M.cells_);
  for (double& c : M.cells_) c /= mass;
  M.finish();
  return M;
}

DiscreteMaxwellian DiscreteMaxwellian::from_interfaces(const VelocityMesh& mesh,
                                                       std::span<const double> interfaces) {
  if (interfaces.size() != mesh.interface_count()) {
    throw std::invalid_argument("discrete Maxwellian: expected " +
                                std::to_string(mesh.interface_count()) +
                                " interface values, got " + std::to_string(interfaces.size()));
  }
  if (interfaces.front() != 0.0 || interfaces.back() != 0.0) {
    throw std::invalid_argument(
        "discrete Maxwellian: interface values must vanish at -v_star and v_star");
  }
  for (std::size_t d = 0; d < interfaces.size(); ++d) {
    const double mirrored = interfaces[interfaces.size() - 1 - d];
    if (interfaces[d] < 0.0 ||
        std::abs(interfaces[d] - mirrored) > 1e-12 * std::max(interfaces[d], mirrored)) {
      throw std::invalid_argument(
          "discrete Maxwellian: interface values must be nonnegative and even in v");
    }
  }

  DiscreteMaxwellian M;
  M.kind_ = Collision::FokkerPlanck;
  M.mesh_ = mesh;
  M.interfaces_.assign(interfaces.begin(), interfaces.end());

  // Scale the interface values first; cell values are derived, never
  // renormalised on their own.
  const double raw_mass = cell_mass(mesh, derive_cells(mesh, M.interfaces_));
  if (!(raw_mass > 0.0)) {
    throw std::invalid_argument("discrete Maxwellian: derived cell mass is not positive");
  }
  for (double& m : M.interfaces_) m /= raw_mass;
  M.cells_ = derive_cells(mesh, M.interfaces_);
  check_cells(mesh, M.cells_);

  double mass = cell_mass(mesh, M.cells_);
  if (std::abs(mass - 1.0) > kMassTolerance) {
    for (double& m : M.interfaces_) m /= mass;
    for (double& c : M.cells_) c /= mass;
    mass = cell_mass(mesh, M.cells_);
    if (std::abs(mass - 1.0) > kMassTolerance) {
      throw std::runtime_error("discrete Maxwellian: unit mass normalisation failed");
    }
  }
  M.finish();
  return M;
}

void DiscreteMaxwellian::finish() {
  gamma_.resize(cells_.size());
  for (std::size_t a = 0; a < cells_.size(); ++a) gamma_[a] = 1.0 / cells_[a];
  m0_ = discrete_moment(*this, 0);
  m2_ = discrete_moment(*this, 2);
  m4_ = discrete_moment(*this, 4);
  if (!(m2_ > 0.0) || !std::isfinite(m4_)) {
    throw std::invalid_argument("discrete Maxwellian: moments m2 > 0 and finite m4 required");
  }
}

double discrete_moment(const DiscreteMaxwellian& M, int k) {
  const VelocityMesh& mesh = M.mesh();
  const std::size_t n = mesh.size();
  double sum = 0.0;
  for (std::size_t a = n / 2; a < n; ++a) {
    const double w = std::pow(std::abs(mesh.center(a)), k);
    sum += w * M.cell(a) * mesh.width(a) + w * M.cell(n - 1 - a) * mesh.width(n - 1 - a);
  }
  return sum;
}

namespace {

double gaussian(double v) {
  return std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

DiscreteMaxwellian gaussian_bgk(const VelocityMesh& mesh) {
  std::vector<double> cells(mesh.size());
  for (std::size_t a = 0; a < mesh.size(); ++a) cells[a] = gaussian(mesh.center(a));
  return DiscreteMaxwellian::from_cells(mesh, cells);
}

DiscreteMaxwellian gaussian_fp(const VelocityMesh& mesh) {
  std::vector<double> interfaces(mesh.interface_count(), 0.0);
  for (std::size_t d = 1; d + 1 < interfaces.size(); ++d) {
    interfaces[d] = gaussian(mesh.interface(d));
  }
  return DiscreteMaxwellian::from_interfaces(mesh, interfaces);
}

DiscreteMaxwellian nongaussian_bgk(const VelocityMesh& mesh) {
  std::vector<double> cells(mesh.size());
  for (std::size_t a = 0; a < mesh.size(); ++a) {
    const double v = mesh.center(a);
    cells[a] = (std::cos(std::numbers::pi * v) + 1.1) / (1.0 + 0.1 * std::pow(std::abs(v), 6));
  }
  return DiscreteMaxwellian::from_cells(mesh, cells);
}

DiscreteMaxwellian load_maxwellian(const VelocityMesh& mesh, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open Maxwellian file " + path);
  std::vector<double> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double value = 0.0;
    if (!(ss >> value)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": not a number");
    }
    values.push_back(value);
  }
  if (values.size() == mesh.size()) return DiscreteMaxwellian::from_cells(mesh, values);
  if (values.size() == mesh.interface_count()) {
    return DiscreteMaxwellian::from_interfaces(mesh, values);
  }
  throw std::runtime_error(path + ": expected " + std::to_string(mesh.size()) + " cell or " +
                           std::to_string(mesh.interface_count()) + " interface values, got " +
                           std::to_string(values.size()));
}

}  // namespace kinap
