#include "kinap/scheme.hpp"

#include <cmath>
#include <stdexcept>

namespace kinap {

using linalg::SparseMatrix;
using linalg::Triplet;

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::Direct:
      return "direct";
    case Formulation::MicroMacro:
      return "micro-macro";
    case Formulation::OverdeterminedMicroMacro:
      return "overdetermined";
  }
  return "unknown";
}

Formulation formulation_from_string(const std::string& name) {
  if (name == "direct") return Formulation::Direct;
  if (name == "micro-macro" || name == "micromacro") return Formulation::MicroMacro;
  if (name == "overdetermined" || name == "overdetermined-micro-macro") {
    return Formulation::OverdeterminedMicroMacro;
  }
  throw std::invalid_argument("unknown formulation '" + name +
                              "' (expected direct, micro-macro or overdetermined)");
}

void SchemeConfig::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("scheme: epsilon must be a finite nonnegative number");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("scheme: dt must be positive");
  }
  if (epsilon == 0.0) {
    if (formulation == Formulation::Direct) {
      throw std::invalid_argument("scheme: the direct formulation is ill-posed for epsilon = 0");
    }
    if (formulation == Formulation::MicroMacro && collision == Collision::FokkerPlanck) {
      throw std::invalid_argument(
          "scheme: the square micro-macro formulation is ill-posed for Fokker-Planck at "
          "epsilon = 0; use the overdetermined formulation");
    }
  }
}

double total_mass(const CellDistribution& f, const PhaseMesh& mesh) {
  double mass = 0.0;
  for (std::size_t i = 0; i < f.nx; ++i) {
    double rho = 0.0;
    for (std::size_t a = 0; a < f.nv; ++a) rho += mesh.v.width(a) * f(i, a);
    mass += mesh.x.width(i) * rho;
  }
  return mass;
}

std::vector<double> density(const CellDistribution& f, const VelocityMesh& v) {
  std::vector<double> rho(f.nx, 0.0);
  for (std::size_t i = 0; i < f.nx; ++i) {
    for (std::size_t a = 0; a < f.nv; ++a) rho[i] += v.width(a) * f(i, a);
  }
  return rho;
}

namespace {

void check_shapes(const CellDistribution& f, const PhaseMesh& mesh, const DiscreteMaxwellian& M) {
  if (f.nx != mesh.nx() || f.nv != mesh.nv() || f.values.size() != f.nx * f.nv) {
    throw std::invalid_argument("distribution shape does not match the phase mesh");
  }
  if (!(M.mesh() == mesh.v)) {
    throw std::invalid_argument("Maxwellian is defined on a different velocity mesh");
  }
}

}  // namespace

namespace {

// Moves the rounding residue of sum_i dx_i lambda_i into mu so the constant
// mode of lambda starts at zero.
void center_fluctuation(std::vector<double>& lambda, double& mu, const SpatialMesh& x) {
  double mean = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) mean += x.width(i) * lambda[i];
  mean /= x.length();
  for (double& l : lambda) l -= mean;
  mu += mean;
}

}  // namespace

MicroMacroState decompose(const CellDistribution& f, const PhaseMesh& mesh,
                          const DiscreteMaxwellian& M, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("decompose: epsilon must be positive");
  }
  check_shapes(f, mesh, M);
  MicroMacroState s;
  const std::vector<double> rho = density(f, mesh.v);
  s.mu = total_mass(f, mesh) / mesh.x.length();
  s.lambda.resize(f.nx);
  s.h.resize(f.values.size());
  for (std::size_t i = 0; i < f.nx; ++i) s.lambda[i] = rho[i] - s.mu;
  center_fluctuation(s.lambda, s.mu, mesh.x);
  for (std::size_t i = 0; i < f.nx; ++i) {
    for (std::size_t a = 0; a < f.nv; ++a) {
      s.h[i * f.nv + a] = (f(i, a) * M.gamma(a) - s.mu - s.lambda[i]) / epsilon;
    }
  }
  return s;
}

MicroMacroState init_state(const CellDistribution& f0, const PhaseMesh& mesh,
                           const DiscreteMaxwellian& M, const SchemeConfig& cfg) {
  cfg.validate();
  if (cfg.epsilon > 0.0) return decompose(f0, mesh, M, cfg.epsilon);
  check_shapes(f0, mesh, M);
  MicroMacroState s;
  const std::vector<double> rho = density(f0, mesh.v);
  s.mu = total_mass(f0, mesh) / mesh.x.length();
  s.lambda.resize(f0.nx);
  for (std::size_t i = 0; i < f0.nx; ++i) s.lambda[i] = rho[i] - s.mu;
  center_fluctuation(s.lambda, s.mu, mesh.x);
  s.h.assign(f0.values.size(), 0.0);
  return s;
}

CellDistribution reconstruct(const MicroMacroState& s, const DiscreteMaxwellian& M,
                             double epsilon) {
  const std::size_t nx = s.lambda.size();
  const std::size_t nv = M.size();
  if (s.h.size() != nx * nv) {
    throw std::invalid_argument("reconstruct: micro part has the wrong size");
  }
  CellDistribution f(nx, nv);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t a = 0; a < nv; ++a) {
      f(i, a) = (s.mu + s.lambda[i] + epsilon * s.h[i * nv + a]) * M.cell(a);
    }
  }
  return f;
}

namespace {

void check_maxwellian(const SchemeConfig& cfg, const PhaseMesh& mesh,
                      const DiscreteMaxwellian& M) {
  if (M.kind() != cfg.collision) {
    throw std::invalid_argument("Maxwellian kind (" + to_string(M.kind()) +
                                ") does not match the collision operator (" +
                                to_string(cfg.collision) + ")");
  }
  if (cfg.collision == Collision::FokkerPlanck && !M.has_interfaces()) {
    throw std::invalid_argument("Fokker-Planck scheme needs interface values of the Maxwellian");
  }
  if (!(M.mesh() == mesh.v)) {
    throw std::invalid_argument("Maxwellian is defined on a different velocity mesh");
  }
}

// Interface conductances M*_{j+1/2} / dv_{j+1/2} above and below cell a.
// Both vanish at the velocity boundary, which realizes the zero-flux condition.
double fp_up(const DiscreteMaxwellian& M, std::size_t a) {
  const auto& v = M.mesh();
  return M.interface(a + 1) / v.dual_width(a + 1);
}

double fp_down(const DiscreteMaxwellian& M, std::size_t a) {
  const auto& v = M.mesh();
  return M.interface(a) / v.dual_width(a);
}

std::unique_ptr<linalg::SpdSolver> factor_normal(const SparseMatrix& A,
                                                 SchemeSystem::Solver kind) {
  SparseMatrix AtA = linalg::normal_system(A);
  if (kind == SchemeSystem::Solver::Dense) {
    return std::make_unique<linalg::DenseSpdFactorization>(std::move(AtA));
  }
  return std::make_unique<linalg::SpdFactorization>(std::move(AtA));
}

}  // namespace

SchemeSystem::SchemeSystem(const SchemeConfig& cfg, const PhaseMesh& mesh,
                           const DiscreteMaxwellian& M, Solver solver)
    : cfg_(cfg), mesh_(mesh), M_(M), nx_(mesh.nx()), nv_(mesh.nv()) {
  cfg_.validate();
  if (cfg_.formulation == Formulation::Direct) {
    throw std::invalid_argument("SchemeSystem assembles micro-macro formulations; use DirectScheme");
  }
  check_maxwellian(cfg_, mesh_, M_);
  if (solver == Solver::Dense && nx_ * nv_ > 512) {
    throw std::invalid_argument("dense solver is limited to N * 2L <= 512");
  }

  const bool constrained = cfg_.formulation == Formulation::OverdeterminedMicroMacro;
  const std::size_t n_unknowns = nx_ + nx_ * nv_;
  const std::size_t n_rows = n_unknowns + (constrained ? nx_ : 0);
  const double eps = cfg_.epsilon;
  const double dt = cfg_.dt;
  const auto& vm = mesh_.v;
  const bool fp = cfg_.collision == Collision::FokkerPlanck;

  std::vector<Triplet> t;
  t.reserve(nx_ * (1 + 2 * nv_) + nx_ * nv_ * (6 + 2 * nv_) + (constrained ? nx_ * nv_ : 0));

  for (std::size_t i = 0; i < nx_; ++i) {
    const std::size_t ip = mesh_.x.next(i);
    const std::size_t im = mesh_.x.prev(i);
    const double c = dt / (2.0 * mesh_.x.width(i));

    // Continuity rows.
    t.push_back({lambda_index(i), lambda_index(i), 1.0});
    for (std::size_t k = 0; k < nv_; ++k) {
      const double w = vm.center(k) * M_.cell(k) * vm.width(k) * c;
      t.push_back({lambda_index(i), h_index(ip, k), w});
      t.push_back({lambda_index(i), h_index(im, k), -w});
    }

    // Micro rows.
    for (std::size_t a = 0; a < nv_; ++a) {
      const std::size_t r = h_index(i, a);
      const double va = vm.center(a);
      t.push_back({r, lambda_index(ip), va * c});
      t.push_back({r, lambda_index(im), -va * c});

      if (fp) {
        const double scale = dt / (vm.width(a) * M_.cell(a));
        const double up = scale * fp_up(M_, a);
        const double down = scale * fp_down(M_, a);
        t.push_back({r, r, eps * eps + up + down});
        if (a + 1 < nv_) t.push_back({r, h_index(i, a + 1), -up});
        if (a > 0) t.push_back({r, h_index(i, a - 1), -down});
      } else {
        t.push_back({r, r, eps * eps + dt});
      }

      if (eps > 0.0) {
        t.push_back({r, h_index(ip, a), eps * va * c});
        t.push_back({r, h_index(im, a), -eps * va * c});
        for (std::size_t k = 0; k < nv_; ++k) {
          const double w = eps * vm.center(k) * vm.width(k) * M_.cell(k) * c;
          t.push_back({r, h_index(ip, k), -w});
          t.push_back({r, h_index(im, k), w});
        }
      }
    }

    if (constrained) {
      for (std::size_t k = 0; k < nv_; ++k) {
        t.push_back({constraint_row(i), h_index(i, k), M_.cell(k) * vm.width(k)});
      }
    }
  }

  A_ = SparseMatrix::from_triplets(n_rows, n_unknowns, t);
  rhs_scale_.assign(n_rows, 0.0);
  for (std::size_t i = 0; i < nx_; ++i) rhs_scale_[lambda_index(i)] = 1.0;
  for (std::size_t q = nx_; q < n_unknowns; ++q) rhs_scale_[q] = eps * eps;

  row_scale_.assign(n_rows, 0.0);
  col_scale_.assign(n_unknowns, 0.0);
  for (std::size_t i = 0; i < nx_; ++i) {
    const double sx = std::sqrt(mesh_.x.width(i));
    row_scale_[lambda_index(i)] = sx;
    col_scale_[lambda_index(i)] = 1.0 / sx;
    if (constrained) row_scale_[constraint_row(i)] = sx;
    for (std::size_t a = 0; a < nv_; ++a) {
      const double w = std::sqrt(mesh_.x.width(i) * M_.cell(a) * vm.width(a));
      row_scale_[h_index(i, a)] = w;
      col_scale_[h_index(i, a)] = 1.0 / w;
    }
  }
  scaled_ = linalg::diagonally_scaled(A_, row_scale_, col_scale_);
  solver_ = factor_normal(scaled_, solver);
}

MicroMacroState SchemeSystem::step(const MicroMacroState& s, linalg::SolveReport* report) const {
  if (s.lambda.size() != nx_ || s.h.size() != nx_ * nv_) {
    throw std::invalid_argument("scheme step: state does not match the assembled system");
  }
  std::vector<double> b(A_.rows(), 0.0);
  for (std::size_t i = 0; i < nx_; ++i) b[lambda_index(i)] = s.lambda[i];
  for (std::size_t q = 0; q < nx_ * nv_; ++q) b[nx_ + q] = rhs_scale_[nx_ + q] * s.h[q];
  for (std::size_t r = 0; r < b.size(); ++r) b[r] *= row_scale_[r];

  std::vector<double> x = linalg::solve_least_squares(scaled_, *solver_, b, report,
                                                      kRefineTolerance, kMaxRefinements);
  for (std::size_t q = 0; q < x.size(); ++q) x[q] *= col_scale_[q];
  MicroMacroState out;
  out.mu = s.mu;
  out.lambda.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nx_));
  out.h.assign(x.begin() + static_cast<std::ptrdiff_t>(nx_), x.end());
  center_fluctuation(out.lambda, out.mu, mesh_.x);
  return out;
}

SchemeSystem assemble(const SchemeConfig& cfg, const PhaseMesh& mesh,
                      const DiscreteMaxwellian& M) {
  return SchemeSystem(cfg, mesh, M);
}

DirectScheme::DirectScheme(const SchemeConfig& cfg, const PhaseMesh& mesh,
                           const DiscreteMaxwellian& M)
    : cfg_(cfg), mesh_(mesh), M_(M) {
  cfg_.validate();
  if (!(cfg_.epsilon > 0.0)) {
    throw std::invalid_argument("direct scheme requires epsilon > 0");
  }
  check_maxwellian(cfg_, mesh_, M_);

  const std::size_t nx = mesh_.nx();
  const std::size_t nv = mesh_.nv();
  const double eps = cfg_.epsilon;
  const double dt = cfg_.dt;
  const auto& vm = mesh_.v;
  const bool fp = cfg_.collision == Collision::FokkerPlanck;
  auto idx = [nv](std::size_t i, std::size_t a) { return i * nv + a; };

  std::vector<Triplet> t;
  t.reserve(nx * nv * (fp ? 5 : 3 + nv));
  for (std::size_t i = 0; i < nx; ++i) {
    const std::size_t ip = mesh_.x.next(i);
    const std::size_t im = mesh_.x.prev(i);
    const double c = eps * dt / (2.0 * mesh_.x.width(i));
    for (std::size_t a = 0; a < nv; ++a) {
      const std::size_t r = idx(i, a);
      t.push_back({r, r, eps * eps});
      t.push_back({r, idx(ip, a), c * vm.center(a)});
      t.push_back({r, idx(im, a), -c * vm.center(a)});
      if (fp) {
        const double up = dt * fp_up(M_, a) / vm.width(a);
        const double down = dt * fp_down(M_, a) / vm.width(a);
        t.push_back({r, r, (up + down) * M_.gamma(a)});
        if (a + 1 < nv) t.push_back({r, idx(i, a + 1), -up * M_.gamma(a + 1)});
        if (a > 0) t.push_back({r, idx(i, a - 1), -down * M_.gamma(a - 1)});
      } else {
        t.push_back({r, r, dt});
        for (std::size_t k = 0; k < nv; ++k) {
          t.push_back({r, idx(i, k), -dt * M_.cell(a) * vm.width(k)});
        }
      }
    }
  }
  A_ = SparseMatrix::from_triplets(nx * nv, nx * nv, t);
  row_scale_.resize(nx * nv);
  col_scale_.resize(nx * nv);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t a = 0; a < nv; ++a) {
      const double w = mesh_.x.width(i) * vm.width(a);
      row_scale_[idx(i, a)] = std::sqrt(w * M_.gamma(a));
      col_scale_[idx(i, a)] = 1.0 / std::sqrt(w * M_.gamma(a));
    }
  }
  scaled_ = linalg::diagonally_scaled(A_, row_scale_, col_scale_);
  solver_ = factor_normal(scaled_, SchemeSystem::Solver::Sparse);
}

CellDistribution DirectScheme::step(const CellDistribution& f) const {
  check_shapes(f, mesh_, M_);
  std::vector<double> b(f.values);
  const double e2 = cfg_.epsilon * cfg_.epsilon;
  for (std::size_t r = 0; r < b.size(); ++r) b[r] *= e2 * row_scale_[r];
  CellDistribution out(f.nx, f.nv);
  out.values = linalg::solve_least_squares(scaled_, *solver_, b, nullptr,
                                           SchemeSystem::kRefineTolerance,
                                           SchemeSystem::kMaxRefinements);
  for (std::size_t q = 0; q < out.values.size(); ++q) out.values[q] *= col_scale_[q];
  return out;
}

CellDistribution step_direct(const SchemeConfig& cfg, const PhaseMesh& mesh,
                             const DiscreteMaxwellian& M, const CellDistribution& f) {
  return DirectScheme(cfg, mesh, M).step(f);
}

}  // namespace kinap
