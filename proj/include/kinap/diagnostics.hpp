#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "kinap/equilibrium.hpp"
#include "kinap/mesh.hpp"
#include "kinap/scheme.hpp"

namespace kinap {

/// Velocity moments per spatial cell:
///   rho_i = sum_j dv_j f_ij
///   J_i   = (1/eps) sum_j dv_j v_j f_ij
///   S_i   = sum_j dv_j (v_j^2 - m2) f_ij
struct MomentSet {
  std::vector<double> rho;
  std::vector<double> J;
  std::vector<double> S;
};

/// Moments of a distribution. Requires epsilon > 0 (J carries 1/eps).
MomentSet moments(const CellDistribution& f, const PhaseMesh& mesh, const DiscreteMaxwellian& M,
                  double epsilon);

/// Moments of a micro-macro state; J is read from the micro part
/// (J_i = sum_j dv_j v_j M_j h_ij) so the epsilon = 0 case is covered.
MomentSet moments(const MicroMacroState& s, const PhaseMesh& mesh, const DiscreteMaxwellian& M,
                  double epsilon);

/// ||f||_{2,gamma}
double weighted_norm(const CellDistribution& f, const PhaseMesh& mesh, const DiscreteMaxwellian& M);

/// ||f - rho M||_{2,gamma} with rho the local density of f.
double local_deviation(const CellDistribution& f, const PhaseMesh& mesh,
                       const DiscreteMaxwellian& M);

/// ||g||_2 = (sum_i dx_i g_i^2)^{1/2}
double l2_norm(std::span<const double> g, const SpatialMesh& mesh);

/// (D_x g)_i = (g_{i+1} - g_{i-1}) / (2 dx_i)
std::vector<double> discrete_gradient(std::span<const double> g, const SpatialMesh& mesh);

/// Norms of a micro-macro state, evaluated without forming f so that they
/// stay accurate for tiny epsilon. The equilibrium deviations are taken
/// against the mean density of the state itself, so rounding drift of the
/// conserved mass does not leave a constant floor in them.
struct StateNorms {
  double to_equilibrium = 0.0;  // ||f - mu M||_{2,gamma}
  double local = 0.0;           // ||f - rho M||_{2,gamma} = eps ||h - hbar||_{2,M}
  double rho_dev = 0.0;         // ||rho - mu||_2
  double h = 0.0;               // ||h||_{2,M}
  double full = 0.0;            // ||f||_{2,gamma}
  double mass = 0.0;            // sum dx dv f
};

StateNorms state_norms(const MicroMacroState& s, const PhaseMesh& mesh,
                       const DiscreteMaxwellian& M, double epsilon);

/// Left side of the discrete entropy inequality,
///   (||f_new||^2 - ||f_old||^2) / (2 dt) + eps^-2 ||f_new - rho_new M||^2,
/// which is nonpositive along the scheme. For epsilon = 0 only the first
/// term is returned.
double entropy_slack(const CellDistribution& f_old, const CellDistribution& f_new,
                     std::span<const double> rho_new, double epsilon, double dt,
                     const PhaseMesh& mesh, const DiscreteMaxwellian& M);

/// Same quantity from consecutive micro-macro states (mu cancels exactly).
double entropy_slack(const MicroMacroState& s_old, const MicroMacroState& s_new, double epsilon,
                     double dt, const PhaseMesh& mesh, const DiscreteMaxwellian& M);

struct PoissonSolution {
  std::vector<double> phi;
  std::vector<double> grad;  // (D_x phi)_i
  double removed_mean = 0.0; // mean of rho projected out before solving
  double residual = 0.0;     // max_i |-(grad_{i+1} - grad_{i-1})/2 - dx_i rho_i|
};

/// Solves -((D_x phi)_{i+1} - (D_x phi)_{i-1}) / 2 = dx_i rho_i with
/// sum_i dx_i phi_i = 0, reusing one factorization for a fixed mesh.
class PoissonSolver {
public:
  explicit PoissonSolver(const SpatialMesh& mesh);
  PoissonSolution solve(std::span<const double> rho) const;

private:
  SpatialMesh mesh_;
  std::unique_ptr<linalg::DenseSpdFactorization> factor_;
};

PoissonSolution poisson_solve(std::span<const double> rho, const SpatialMesh& mesh);

/// Torus Poincare constant R / (N sin(pi / N)).
double torus_poincare_constant(const SpatialMesh& mesh);

/// Constants of the modified-entropy certificate.
struct EntropyConfig {
  double eta = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  double C_P = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;
  double dt_max = 0.0;
  double K_eta = 0.0;
  double K2_eta = 0.0;  // 1 + 2 eta sqrt(m2) C_P + eta m2 dt_max
  double kappa_eta = 0.0;
  double beta = 0.0;
  double lower = 0.0;   // H >= lower ||f - mu M||^2
  double upper = 0.0;   // H <= upper ||f - mu M||^2
  double C = 0.0;       // ||f^n - mu M|| <= C exp(-beta t^n / 2) ||f^0 - mu M||

  bool admissible() const { return eta > 0.0 && eta < eta1 && eta < eta2 && K_eta > 0.0; }
};

EntropyConfig compute_eta_admissible(const DiscreteMaxwellian& M, double C_P, double dt_max);

/// Modified entropy at step n >= 1, evaluated on the mean-shifted state:
///   1/2 ||f - mu M||^2 + eta eps^2 sum dx J D_x phi
///     + eta eps^2 / 2 sum dx (D_x phi^n - D_x phi^{n-1})^2 / dt
double modified_entropy(const MicroMacroState& s, std::span<const double> grad_phi,
                        std::span<const double> grad_phi_prev, const EntropyConfig& cfg,
                        double epsilon, double dt, const PhaseMesh& mesh,
                        const DiscreteMaxwellian& M);

/// Keeps the previous Poisson gradient so the modified entropy can be
/// evaluated once per step. Owned by a single simulation loop.
class ModifiedEntropyTracker {
public:
  ModifiedEntropyTracker(EntropyConfig cfg, double epsilon, double dt, const PhaseMesh& mesh,
                         const DiscreteMaxwellian& M);

  /// Records the state of step n; returns H(f^n) for n >= 1 and nothing for
  /// the first recorded state.
  std::optional<double> update(const MicroMacroState& s);

  const EntropyConfig& config() const { return cfg_; }

private:
  EntropyConfig cfg_;
  double epsilon_;
  double dt_;
  PhaseMesh mesh_;
  DiscreteMaxwellian M_;
  PoissonSolver poisson_;
  std::optional<std::vector<double>> prev_grad_;
};

struct RateFit {
  double rate = 0.0;       // slope of log(value) against t
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

struct FitWindow {
  double t_lo;
  double t_hi;
};

/// Least-squares slope of log(value) on the window. Points with values at or
/// below 1e-12 value(0) are always excluded. Without an explicit window the
/// fit uses the leading run of usable points minus its first
/// `transient_fraction`.
RateFit fit_decay_rate(std::span<const double> t, std::span<const double> values,
                       std::optional<FitWindow> window = std::nullopt,
                       double transient_fraction = 0.1);

struct PeriodEstimate {
  double period = 0.0;
  std::vector<double> maxima;  // refined times of all local maxima above the floor
  std::size_t first_used = 0;  // index into maxima where the averaging starts
};

/// Mean spacing of successive local maxima (three-point test, parabolic
/// refinement). Maxima at or below floor_ratio times the series maximum are
/// ignored, and the first `transient_fraction` of them are skipped as long as
/// three remain.
PeriodEstimate estimate_oscillation_period(std::span<const double> t,
                                           std::span<const double> values,
                                           double floor_ratio = 1e-12,
                                           double transient_fraction = 0.0);

/// One row of the per-step diagnostics stream.
struct DiagnosticsRecord {
  std::size_t n = 0;
  double t = 0.0;
  double norm_to_eq = 0.0;
  double norm_local = 0.0;
  double rho_dev = 0.0;
  double h_norm = 0.0;
  double H = 0.0;  // NaN at n = 0
  double mass = 0.0;
  double slack = 0.0;
};

}  // namespace kinap
