#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kinap/equilibrium.hpp"
#include "kinap/linalg.hpp"
#include "kinap/mesh.hpp"

namespace kinap {

enum class Formulation { Direct, MicroMacro, OverdeterminedMicroMacro };

std::string to_string(Formulation f);
Formulation formulation_from_string(const std::string& name);

struct SchemeConfig {
  double epsilon = 1.0;
  double dt = 0.1;
  Collision collision = Collision::FokkerPlanck;
  Formulation formulation = Formulation::OverdeterminedMicroMacro;

  /// Throws std::invalid_argument for an ill-posed combination: epsilon = 0
  /// is only accepted by the overdetermined micro-macro system, and by the
  /// square micro-macro system with the BGK operator.
  void validate() const;
};

/// Distribution values f_{ij}, row-major in the spatial index.
struct CellDistribution {
  std::size_t nx = 0;
  std::size_t nv = 0;
  std::vector<double> values;

  CellDistribution() = default;
  CellDistribution(std::size_t nx_, std::size_t nv_, double fill = 0.0)
      : nx(nx_), nv(nv_), values(nx_ * nv_, fill) {}

  double& operator()(std::size_t i, std::size_t a) { return values[i * nv + a]; }
  double operator()(std::size_t i, std::size_t a) const { return values[i * nv + a]; }
};

/// Micro-macro unknowns: f_{ij} = (mu + lambda_i + eps h_{ij}) M_j.
///
/// mu is the mean density (total mass divided by the torus length), so the
/// fluctuation lambda has zero spatial mean on any torus.
struct MicroMacroState {
  std::vector<double> lambda;
  std::vector<double> h;  // row-major (i, a)
  double mu = 0.0;

  std::size_t nx() const { return lambda.size(); }
};

/// Total discrete mass sum_{ij} dx_i dv_j f_ij.
double total_mass(const CellDistribution& f, const PhaseMesh& mesh);

/// rho_i = sum_j dv_j f_ij
std::vector<double> density(const CellDistribution& f, const VelocityMesh& v);

/// Splits f into micro-macro unknowns. Requires epsilon > 0.
MicroMacroState decompose(const CellDistribution& f, const PhaseMesh& mesh,
                          const DiscreteMaxwellian& M, double epsilon);

/// decompose() for epsilon > 0; for epsilon = 0 the micro part starts at zero.
MicroMacroState init_state(const CellDistribution& f0, const PhaseMesh& mesh,
                           const DiscreteMaxwellian& M, const SchemeConfig& cfg);

CellDistribution reconstruct(const MicroMacroState& s, const DiscreteMaxwellian& M,
                             double epsilon);

/// Assembled micro-macro system M^eps U^{n+1} = D^eps U^n with a cached
/// factorization of the normal matrix.
///
/// Unknowns are ordered [lambda_0..lambda_{N-1} | h_{0,0} .. h_{N-1,2L-1}].
/// Rows are the N continuity rows, then the N*2L micro rows, then (for the
/// overdetermined formulation) the N mean-free constraint rows.
///
/// matrix() holds the unscaled coefficients. The factored system is
/// diag(row_scaling) * M^eps * diag(column_scaling), which measures lambda in
/// the sqrt(dx_i) weight and h in the sqrt(dx_i M_j dv_j) weight. Both
/// systems are consistent and share one least-squares solution.
class SchemeSystem {
public:
  enum class Solver { Sparse, Dense };

  SchemeSystem(const SchemeConfig& cfg, const PhaseMesh& mesh, const DiscreteMaxwellian& M,
               Solver solver = Solver::Sparse);

  const SchemeConfig& config() const { return cfg_; }
  const PhaseMesh& mesh() const { return mesh_; }
  const DiscreteMaxwellian& maxwellian() const { return M_; }

  const linalg::SparseMatrix& matrix() const { return A_; }
  /// (M^eps)^T M^eps, formed on request.
  linalg::SparseMatrix normal_matrix() const { return linalg::normal_system(A_); }

  const linalg::SparseMatrix& scaled_matrix() const { return scaled_; }
  const linalg::SparseMatrix& scaled_normal_matrix() const { return solver_->matrix(); }
  std::span<const double> row_scaling() const { return row_scale_; }
  std::span<const double> column_scaling() const { return col_scale_; }
  const linalg::SpdSolver& solver() const { return *solver_; }

  /// Diagonal of D^eps, one entry per row of the system matrix.
  std::span<const double> rhs_scaling() const { return rhs_scale_; }

  std::size_t unknowns() const { return A_.cols(); }
  std::size_t lambda_index(std::size_t i) const { return i; }
  std::size_t h_index(std::size_t i, std::size_t a) const { return nx_ + i * nv_ + a; }
  std::size_t constraint_row(std::size_t i) const { return nx_ + nx_ * nv_ + i; }

  /// One step of the least-squares update. The rounding residue of
  /// sum_i dx_i lambda_i is moved into mu, so lambda stays mean free.
  MicroMacroState step(const MicroMacroState& s, linalg::SolveReport* report = nullptr) const;

  /// Stopping threshold on ||A^T (b - A x)|| relative to ||A^T b||.
  static constexpr double kRefineTolerance = 1e-12;
  static constexpr int kMaxRefinements = 3;

private:
  SchemeConfig cfg_;
  PhaseMesh mesh_;
  DiscreteMaxwellian M_;
  std::size_t nx_;
  std::size_t nv_;
  linalg::SparseMatrix A_;
  linalg::SparseMatrix scaled_;
  std::vector<double> rhs_scale_;
  std::vector<double> row_scale_;
  std::vector<double> col_scale_;
  std::unique_ptr<linalg::SpdSolver> solver_;
};

SchemeSystem assemble(const SchemeConfig& cfg, const PhaseMesh& mesh, const DiscreteMaxwellian& M);

/// Implicit scheme written directly in the distribution f. Each cell balance
/// is multiplied by eps / (dx_i dv_j), so the time-derivative coefficient is
/// eps^2. Requires epsilon > 0. The factored copy uses the unknowns
/// f_ij sqrt(dx_i dv_j / M_j).
class DirectScheme {
public:
  DirectScheme(const SchemeConfig& cfg, const PhaseMesh& mesh, const DiscreteMaxwellian& M);

  const linalg::SparseMatrix& matrix() const { return A_; }
  CellDistribution step(const CellDistribution& f) const;

private:
  SchemeConfig cfg_;
  PhaseMesh mesh_;
  DiscreteMaxwellian M_;
  linalg::SparseMatrix A_;
  linalg::SparseMatrix scaled_;
  std::vector<double> row_scale_;
  std::vector<double> col_scale_;
  std::unique_ptr<linalg::SpdSolver> solver_;
};

CellDistribution step_direct(const SchemeConfig& cfg, const PhaseMesh& mesh,
                             const DiscreteMaxwellian& M, const CellDistribution& f);

/// Implicit wide-stencil heat scheme
///   dx_i (rho_i^{n+1} - rho_i^n) / dt = m2/2 ((D_x rho^{n+1})_{i+1} - (D_x rho^{n+1})_{i-1})
/// with (D_x rho)_i = (rho_{i+1} - rho_{i-1}) / (2 dx_i). Rows are multiplied
/// by dx_i, which makes the matrix symmetric positive definite.
class HeatScheme {
public:
  HeatScheme(const SpatialMesh& mesh, double m2, double dt);

  const linalg::SparseMatrix& matrix() const { return factor_.matrix(); }
  std::vector<double> step(std::span<const double> rho) const;

private:
  SpatialMesh mesh_;
  linalg::SpdFactorization factor_;
};

std::vector<double> heat_step(std::span<const double> rho, double m2, double dt,
                              const SpatialMesh& mesh);

}  // namespace kinap
