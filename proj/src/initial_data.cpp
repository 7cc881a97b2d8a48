#include "kinap/initial_data.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace kinap {

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::FarEquilibrium:
      return "far_eq";
    case InitialKind::CloseEquilibrium:
      return "close_eq";
    case InitialKind::RandomUniform:
      return "random_uniform";
    case InitialKind::RandomTruncated:
      return "random_truncated";
    case InitialKind::Ball:
      return "ball";
    case InitialKind::Equilibrium:
      return "equilibrium";
    case InitialKind::File:
      return "file";
  }
  return "unknown";
}

InitialKind initial_kind_from_string(const std::string& name) {
  for (InitialKind k : {InitialKind::FarEquilibrium, InitialKind::CloseEquilibrium,
                        InitialKind::RandomUniform, InitialKind::RandomTruncated, InitialKind::Ball,
                        InitialKind::Equilibrium, InitialKind::File}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown initial data kind '" + name + "'");
}

namespace {

CellDistribution read_distribution(const std::string& path, const PhaseMesh& mesh) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open initial data file " + path);
  CellDistribution f(mesh.nx(), mesh.nv());
  std::string line;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string token;
    while (ss >> token) {
      double value = 0.0;
      try {
        std::size_t used = 0;
        value = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": '" + token + "' is not a number");
      }
      if (count == f.values.size()) {
        throw std::runtime_error(path + ": more than " + std::to_string(f.values.size()) +
                                 " values");
      }
      f.values[count++] = value;
    }
  }
  if (count != f.values.size()) {
    throw std::runtime_error(path + ": expected " + std::to_string(f.values.size()) +
                             " values, got " + std::to_string(count));
  }
  return f;
}

}  // namespace

CellDistribution generate_initial(const InitialData& init, const PhaseMesh& mesh,
                                  const DiscreteMaxwellian& M, std::uint64_t seed) {
  const std::size_t nx = mesh.nx();
  const std::size_t nv = mesh.nv();
  const double R = mesh.x.length();
  const double two_pi = 2.0 * std::numbers::pi;
  CellDistribution f(nx, nv);
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  switch (init.kind) {
    case InitialKind::FarEquilibrium:
      for (std::size_t i = 0; i < nx; ++i) {
        const double sx = 0.5 * (1.0 + std::cos(2.0 * two_pi * mesh.x.center(i) / R));
        for (std::size_t a = 0; a < nv; ++a) {
          const double v = mesh.v.center(a);
          f(i, a) = v * v * v * v * std::exp(-0.5 * v * v) / std::sqrt(two_pi) * sx;
        }
      }
      break;
    case InitialKind::CloseEquilibrium:
      for (std::size_t i = 0; i < nx; ++i) {
        const double sx = 1.0 + std::cos(two_pi * mesh.x.center(i) / R);
        for (std::size_t a = 0; a < nv; ++a) f(i, a) = sx * M.cell(a);
      }
      break;
    case InitialKind::RandomUniform:
      for (double& value : f.values) value = uniform();
      break;
    case InitialKind::RandomTruncated:
      for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t a = 0; a < nv; ++a) {
          const double u = uniform();
          f(i, a) = std::abs(mesh.v.center(a)) <= init.truncation ? u : 0.0;
        }
      }
      break;
    case InitialKind::Ball:
      for (std::size_t i = 0; i < nx; ++i) {
        const double dx = mesh.x.center(i) - 0.5 * R;
        for (std::size_t a = 0; a < nv; ++a) {
          const double v = mesh.v.center(a);
          f(i, a) = dx * dx / 0.04 + v * v / 4.0 <= 1.0 ? 1.0 : 0.0;
        }
      }
      break;
    case InitialKind::Equilibrium:
      for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t a = 0; a < nv; ++a) f(i, a) = M.cell(a);
      }
      break;
    case InitialKind::File:
      f = read_distribution(init.path, mesh);
      break;
  }

  double mass = 0.0;
  for (double value : f.values) {
    if (!std::isfinite(value) || value < 0.0) {
      throw std::invalid_argument("initial data must be finite and nonnegative");
    }
  }
  mass = total_mass(f, mesh);
  if (!(mass > 0.0)) throw std::invalid_argument("initial data has zero mass");
  return f;
}

}  // namespace kinap
