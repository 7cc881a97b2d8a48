#include "kinap/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinap/diagnostics.hpp"

namespace kinap {

PoincareReport verify_gaussian_poincare(std::span<const double> f, const DiscreteMaxwellian& M) {
  if (M.kind() != Collision::FokkerPlanck || !M.has_interfaces()) {
    throw std::invalid_argument(
        "Gaussian Poincare check needs a Fokker-Planck Maxwellian with interface values");
  }
  const VelocityMesh& v = M.mesh();
  const std::size_t n = v.size();
  if (f.size() != n) {
    throw std::invalid_argument("Gaussian Poincare check: expected " + std::to_string(n) +
                                " values, got " + std::to_string(f.size()));
  }
  double rho = 0.0;
  for (std::size_t a = 0; a < n; ++a) rho += v.width(a) * f[a];

  PoincareReport r;
  for (std::size_t a = 0; a < n; ++a) {
    const double d = f[a] - rho * M.cell(a);
    r.lhs += d * d * M.gamma(a) * v.width(a);
  }
  for (std::size_t a = 0; a + 1 < n; ++a) {
    const std::size_t d = a + 1;
    const double grad = (f[a + 1] * M.gamma(a + 1) - f[a] * M.gamma(a)) / v.dual_width(d);
    r.rhs += grad * grad * M.interface(d) * v.dual_width(d);
  }
  r.constant = 1.0;
  r.margin = r.rhs - r.lhs;
  return r;
}

PoincareReport verify_torus_poincare(std::span<const double> phi, const SpatialMesh& mesh) {
  if (mesh.size() % 2 == 0) {
    throw std::invalid_argument("torus Poincare check needs an odd number of cells");
  }
  if (phi.size() != mesh.size()) {
    throw std::invalid_argument("torus Poincare check: phi has the wrong length");
  }
  PoincareReport r;
  double mass = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) mass += mesh.width(i) * phi[i];
  r.removed_mean = mass / mesh.length();
  std::vector<double> centered(phi.begin(), phi.end());
  double scale = 0.0;
  for (double p : phi) scale = std::max(scale, std::abs(p));
  if (std::abs(r.removed_mean) > 1e-14 * scale) {
    r.projected = true;
    for (double& p : centered) p -= r.removed_mean;
  }
  r.constant = torus_poincare_constant(mesh);
  r.lhs = l2_norm(centered, mesh);
  r.rhs = r.constant * l2_norm(discrete_gradient(centered, mesh), mesh);
  r.margin = r.rhs - r.lhs;
  return r;
}

double relative_margin(const PoincareReport& r) {
  const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
  return scale > 0.0 ? r.margin / scale : 0.0;
}

namespace {

template <class Check>
InequalitySuiteReport run_suite(std::size_t n, std::size_t samples, std::uint64_t seed,
                                double tolerance, Check&& check) {
  std::mt19937_64 rng(seed);
  InequalitySuiteReport out;
  std::vector<double> x(n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (double& value : x) value = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
    const PoincareReport r = check(x);
    const double rel = relative_margin(r);
    ++out.samples;
    if (r.projected) ++out.projected;
    if (rel < -tolerance) ++out.violations;
    out.worst_relative_margin = std::min(out.worst_relative_margin, rel);
  }
  return out;
}

}  // namespace

InequalitySuiteReport gaussian_poincare_suite(const DiscreteMaxwellian& M, std::size_t samples,
                                              std::uint64_t seed, double tolerance) {
  return run_suite(M.size(), samples, seed, tolerance,
                   [&](const std::vector<double>& f) { return verify_gaussian_poincare(f, M); });
}

InequalitySuiteReport torus_poincare_suite(const SpatialMesh& mesh, std::size_t samples,
                                           std::uint64_t seed, double tolerance) {
  InequalitySuiteReport out =
      run_suite(mesh.size(), samples, seed, tolerance,
                [&](const std::vector<double>& phi) { return verify_torus_poincare(phi, mesh); });
  const std::size_t n = mesh.size();
  auto ratio_for_mode = [&](std::size_t k) {
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) {
      phi[i] = std::cos(2.0 * std::numbers::pi * static_cast<double>(k) * mesh.center(i) /
                        mesh.length());
    }
    const PoincareReport r = verify_torus_poincare(phi, mesh);
    return r.rhs / r.lhs;
  };
  if (n >= 3) {
    out.extremal_ratio = ratio_for_mode((n - 1) / 2);
    out.k1_ratio = ratio_for_mode(1);
  }
  return out;
}

}  // namespace kinap
