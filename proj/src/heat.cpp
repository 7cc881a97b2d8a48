#include <cmath>
#include <stdexcept>

#include "kinap/scheme.hpp"

namespace kinap {

namespace {

linalg::SparseMatrix heat_matrix(const SpatialMesh& mesh, double m2, double dt) {
  if (!(m2 > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("heat scheme: m2 and dt must be positive");
  }
  if (mesh.size() % 2 == 0) {
    throw std::invalid_argument("heat scheme: N must be odd");
  }
  const std::size_t n = mesh.size();
  const double c = dt * m2 / 4.0;
  std::vector<linalg::Triplet> t;
  t.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = mesh.next(i);
    const std::size_t im = mesh.prev(i);
    const double up = c / mesh.width(ip);
    const double down = c / mesh.width(im);
    t.push_back({i, i, mesh.width(i) + up + down});
    t.push_back({i, mesh.next(ip), -up});
    t.push_back({i, mesh.prev(im), -down});
  }
  return linalg::SparseMatrix::from_triplets(n, n, t, true);
}

}  // namespace

HeatScheme::HeatScheme(const SpatialMesh& mesh, double m2, double dt)
    : mesh_(mesh), factor_(heat_matrix(mesh, m2, dt)) {}

std::vector<double> HeatScheme::step(std::span<const double> rho) const {
  if (rho.size() != mesh_.size()) {
    throw std::invalid_argument("heat step: density has the wrong length");
  }
  std::vector<double> b(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) b[i] = mesh_.width(i) * rho[i];
  return factor_.solve(b);
}

std::vector<double> heat_step(std::span<const double> rho, double m2, double dt,
                              const SpatialMesh& mesh) {
  return HeatScheme(mesh, m2, dt).step(rho);
}

}  // namespace kinap
