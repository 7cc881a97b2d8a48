#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kinap/diagnostics.hpp"
#include "kinap/equilibrium.hpp"
#include "kinap/initial_data.hpp"
#include "kinap/mesh.hpp"
#include "kinap/scheme.hpp"

namespace kinap {

/// Raised by the simulation loop when a per-step invariant fails.
class InvariantViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct InvariantTolerances {
  double mass = 1e-12;        // |mass_n - mass_0| / mass_0
  double slack = 1e-10;       // entropy slack / ||f^n||^2
  double constraint = 1e-10;  // max_i |sum_j dv_j M_j h_ij| / max(1, max |h|)
  double entropy = 1e-10;     // (H^{n+1} - H^n) / |H^n|
  double bound = 1e-10;       // certificate decay bound, relative
};

struct ExperimentConfig {
  std::string test = "custom";

  double v_star = 8.0;
  int L = 20;
  double R = 1.0;
  int N = 51;
  /// Optional explicit meshes: positive velocity interfaces (0 excluded, v*
  /// last) and spatial cell widths. They override v_star/L and R/N.
  std::vector<double> v_interfaces;
  std::vector<double> x_widths;

  double dt = 0.1;
  double t_final = 10.0;
  std::vector<double> epsilons{1.0};
  /// Torus lengths swept in addition to epsilon; empty means {R}.
  std::vector<double> torus_lengths;

  Collision collision = Collision::FokkerPlanck;
  Formulation formulation = Formulation::OverdeterminedMicroMacro;
  std::string maxwellian = "gaussian";  // gaussian | nongaussian | file
  std::string maxwellian_file;
  InitialData initial;

  std::uint64_t seed = 20240611;
  std::string output_dir;  // empty: nothing is written
  std::vector<double> snapshot_times;
  std::vector<double> heat_times;
  std::optional<FitWindow> fit_window;
  /// Share of the usable decay series (and of the oscillation maxima)
  /// treated as transient when no explicit window is given.
  double transient_fraction = 0.5;
  bool measure_period = false;
  /// Maxima of ||rho - mu|| below this fraction of its peak are ignored.
  double period_floor = 1e-20;
  bool track_entropy = true;
  bool strict = true;  // throw InvariantViolation instead of recording it
  unsigned threads = 0;
  InvariantTolerances tolerances;

  static ExperimentConfig preset(const std::string& test);
  /// Fields absent from the JSON keep the values of the preset named by its
  /// "test" key (or of "custom").
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  std::string to_json_text() const;

  void validate() const;

  std::vector<double> lengths() const;
  PhaseMesh phase_mesh(double R) const;
  DiscreteMaxwellian equilibrium(const VelocityMesh& v) const;
  SchemeConfig scheme(double epsilon) const;
};

struct HeatComparison {
  double t = 0.0;
  double error = 0.0;      // ||rho^eps - rho_heat||_2
  double heat_norm = 0.0;  // ||rho_heat - mu||_2
};

struct Snapshot {
  double t = 0.0;
  CellDistribution f;
  MomentSet macro;
};

struct TrajectoryResult {
  double epsilon = 0.0;
  double R = 0.0;
  std::optional<EntropyConfig> certificate;
  std::vector<DiagnosticsRecord> records;
  std::vector<Snapshot> snapshots;
  std::vector<HeatComparison> heat;
  std::optional<RateFit> rate;
  std::optional<PeriodEstimate> period;

  double max_slack_ratio = -std::numeric_limits<double>::infinity();
  double max_mass_drift = 0.0;
  double max_constraint = 0.0;
  double max_entropy_increase = -std::numeric_limits<double>::infinity();
  double max_bound_ratio = 0.0;
  std::vector<std::string> violations;
  double seconds = 0.0;

  std::vector<double> times() const;
  std::vector<double> series(double DiagnosticsRecord::*field) const;
};

/// One trajectory at fixed (epsilon, R). Pure computation, no files.
TrajectoryResult simulate(const ExperimentConfig& cfg, double epsilon, double R);

struct ExperimentSummary {
  ExperimentConfig config;
  std::vector<TrajectoryResult> runs;  // epsilon-major, then torus length

  bool ok() const;
  std::string to_json_text() const;
};

/// Runs every (epsilon, R) pair as an independent task, then writes the CSV
/// streams and summary.json when an output directory is configured.
ExperimentSummary run(const ExperimentConfig& cfg);

void write_outputs(const ExperimentSummary& summary);

}  // namespace kinap
