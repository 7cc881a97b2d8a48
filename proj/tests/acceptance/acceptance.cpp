#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "kinap/diagnostics.hpp"
#include "kinap/experiments.hpp"
#include "kinap/inequalities.hpp"
#include "kinap/initial_data.hpp"
#include "kinap/linalg.hpp"
#include "kinap/scheme.hpp"

using namespace kinap;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

// Every simulated trajectory is kept so the per-step invariants can be
// judged over all runs at the end.
std::vector<TrajectoryResult> g_runs;

TrajectoryResult keep(TrajectoryResult r) {
  g_runs.push_back(r);
  return r;
}

ExperimentConfig relaxed(ExperimentConfig c) {
  c.strict = false;
  c.threads = 1;
  return c;
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------------------

Outcome scheme_equivalence() {
  const PhaseMesh mesh{SpatialMesh::uniform(1.0, 5), VelocityMesh::uniform(8.0, 2)};
  double worst = 0.0;
  for (Collision c : {Collision::FokkerPlanck, Collision::BGK}) {
    const DiscreteMaxwellian M = c == Collision::FokkerPlanck ? gaussian_fp(mesh.v) : gaussian_bgk(mesh.v);
    for (double eps : {1.0, 0.1}) {
      const SchemeConfig over_cfg{eps, 0.1, c, Formulation::OverdeterminedMicroMacro};
      const SchemeConfig direct_cfg{eps, 0.1, c, Formulation::Direct};
      const SchemeSystem over(over_cfg, mesh, M);
      const DirectScheme direct(direct_cfg, mesh, M);
      CellDistribution f = generate_initial({InitialKind::RandomUniform}, mesh, M, 2024);
      MicroMacroState s = init_state(f, mesh, M, over_cfg);
      for (int n = 0; n < 20; ++n) {
        f = direct.step(f);
        s = over.step(s);
        const CellDistribution g = reconstruct(s, M, eps);
        double diff = 0.0;
        for (std::size_t k = 0; k < f.values.size(); ++k) diff = std::max(diff, std::abs(f.values[k] - g.values[k]));
        worst = std::max(worst, diff / max_abs(g.values));
      }
    }
  }
  return {worst <= 1e-10, fmt("max relative deviation %.3e (limit 1e-10)", worst)};
}

Outcome diffusion_limit() {
  const PhaseMesh mesh{SpatialMesh::uniform(1.0, 51), VelocityMesh::uniform(8.0, 20)};
  double worst_step = 0.0;
  double worst_traj = 0.0;
  for (Collision c : {Collision::FokkerPlanck, Collision::BGK}) {
    const DiscreteMaxwellian M = c == Collision::FokkerPlanck ? gaussian_fp(mesh.v) : gaussian_bgk(mesh.v);
    const SchemeConfig cfg{0.0, 0.1, c, Formulation::OverdeterminedMicroMacro};
    const SchemeSystem sys(cfg, mesh, M);
    const HeatScheme heat(mesh.x, M.m2(), cfg.dt);
    MicroMacroState s = init_state(generate_initial({InitialKind::RandomUniform}, mesh, M, 7), mesh, M, cfg);
    std::vector<double> reference = s.lambda;
    std::vector<double> gaps;
    double scale = max_abs(reference);
    for (int n = 0; n < 100; ++n) {
      const std::vector<double> one_step = heat.step(s.lambda);
      reference = heat.step(reference);
      s = sys.step(s);
      double step_gap = 0.0, traj_gap = 0.0;
      for (std::size_t i = 0; i < s.lambda.size(); ++i) {
        step_gap = std::max(step_gap, std::abs(s.lambda[i] - one_step[i]));
        traj_gap = std::max(traj_gap, std::abs(s.lambda[i] - reference[i]));
      }
      const double now = max_abs(one_step);
      if (now > 0.0) worst_step = std::max(worst_step, step_gap / now);
      scale = std::max(scale, max_abs(reference));
      gaps.push_back(traj_gap);
    }
    for (double g : gaps) worst_traj = std::max(worst_traj, g / scale);
  }
  const bool pass = worst_step <= 1e-12 && worst_traj <= 1e-12;
  return {pass, fmt("one-step relative gap %.3e, trajectory gap relative to its peak %.3e (limit 1e-12)",
                    worst_step, worst_traj)};
}

Outcome ap_convergence() {
  ExperimentConfig cfg = relaxed(ExperimentConfig::preset("test1"));
  cfg.t_final = 10.0;
  cfg.epsilons = {0.5, 0.1, 0.01};
  cfg.heat_times = {10.0};
  cfg.snapshot_times.clear();
  std::vector<double> errors;
  for (double eps : cfg.epsilons) {
    const TrajectoryResult r = keep(simulate(cfg, eps, cfg.R));
    errors.push_back(r.heat.empty() ? std::numeric_limits<double>::quiet_NaN() : r.heat.back().error);
  }
  const bool pass = errors[1] < errors[0] && errors[2] < errors[1];
  return {pass, fmt("||rho - rho_heat||_2 at t=10: eps=0.5 %.3e, 0.1 %.3e, 0.01 %.3e (strictly decreasing required)",
                    errors[0], errors[1], errors[2])};
}

Outcome rate_table() {
  ExperimentConfig cfg = relaxed(ExperimentConfig::preset("test3"));
  cfg.epsilons = {1.0, 0.8, 0.5, 0.1, 1e-2, 1e-10, 0.0};
  std::vector<double> rates;
  for (double eps : cfg.epsilons) {
    const TrajectoryResult r = keep(simulate(cfg, eps, cfg.R));
    rates.push_back(r.rate ? r.rate->rate : std::numeric_limits<double>::quiet_NaN());
  }
  bool pass = rates[0] >= -1.08 && rates[0] <= -0.88;
  for (std::size_t k : {4u, 5u, 6u}) pass = pass && rates[k] >= -8.45 && rates[k] <= -7.65;
  bool monotone = true;
  for (std::size_t k = 1; k < rates.size(); ++k) {
    monotone = monotone && rates[k] <= rates[k - 1] + 1e-12 * std::abs(rates[k - 1]);
  }
  pass = pass && monotone;
  return {pass, fmt("rates eps=1 %.4f [-1.08,-0.88]; 0.8 %.4f; 0.5 %.4f; 0.1 %.4f; 1e-2 %.4f, 1e-10 %.4f, 0 %.4f "
                    "[-8.45,-7.65]; monotone within 1e-12 relative rounding %s",
                    rates[0], rates[1], rates[2], rates[3], rates[4], rates[5], rates[6],
                    monotone ? "yes" : "no")};
}

Outcome test2_rates() {
  ExperimentConfig cfg = relaxed(ExperimentConfig::preset("test2"));
  cfg.snapshot_times.clear();
  const TrajectoryResult truncated = keep(simulate(cfg, 1.0, cfg.R));
  cfg.initial.kind = InitialKind::Ball;
  const TrajectoryResult ball = keep(simulate(cfg, 1.0, cfg.R));
  const double a = truncated.rate ? truncated.rate->rate : std::numeric_limits<double>::quiet_NaN();
  const double b = ball.rate ? ball.rate->rate : std::numeric_limits<double>::quiet_NaN();
  const bool pass = std::abs(a + 1.003) <= 0.1003 && std::abs(b + 1.96) <= 0.196;
  return {pass, fmt("random-truncated %.4f (target -1.003 +-10%%), ball %.4f (target -1.96 +-10%%)", a, b)};
}

Outcome certificate() {
  ExperimentConfig cfg = relaxed(ExperimentConfig::preset("test3"));
  cfg.epsilons = {0.0, 0.01, 1.0};
  double rise = -std::numeric_limits<double>::infinity();
  double ratio = 0.0;
  double beta = 0.0, C = 0.0;
  for (double eps : cfg.epsilons) {
    const TrajectoryResult r = keep(simulate(cfg, eps, cfg.R));
    rise = std::max(rise, r.max_entropy_increase);
    ratio = std::max(ratio, r.max_bound_ratio);
    if (r.certificate) {
      beta = r.certificate->beta;
      C = r.certificate->C;
    }
  }
  const bool pass = rise <= 1e-10 && ratio <= 1.0;
  return {pass, fmt("max relative H increase %.3e (limit 1e-10); max ||f-muM|| / (C e^{-beta t/2} ||f0-muM||) %.4f "
                    "(limit 1); C=%.4f beta=%.4e",
                    rise, ratio, C, beta)};
}

Outcome oscillations() {
  ExperimentConfig cfg = relaxed(ExperimentConfig::preset("test4"));
  const std::vector<double> lengths{kPi / 4.0, kPi / 2.0, kPi, 1.5 * kPi};
  const std::vector<double> expected{2.31, 4.33, 8.67, 13.5};
  bool pass = true;
  std::string detail;
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    const TrajectoryResult r = keep(simulate(cfg, 1.0, lengths[k]));
    const double period = r.period ? r.period->period : std::numeric_limits<double>::quiet_NaN();
    const double speed = lengths[k] / period;
    const double off = period / expected[k] - 1.0;
    const bool ok = std::abs(off) <= 0.05 && speed >= 0.32 && speed <= 0.38;
    pass = pass && ok;
    detail += fmt("%sR=%.4f period %.4f (target %.2f, %+.1f%%) R*nu %.4f", k ? "; " : "", lengths[k],
                  period, expected[k], 100.0 * off, speed);
  }
  return {pass, detail};
}

Outcome entropy_inequality() {
  double slack = -std::numeric_limits<double>::infinity();
  double drift = 0.0;
  std::size_t steps = 0;
  for (const TrajectoryResult& r : g_runs) {
    slack = std::max(slack, r.max_slack_ratio);
    drift = std::max(drift, r.max_mass_drift);
    steps += r.records.size() - 1;
  }
  const bool pass = !g_runs.empty() && slack <= 1e-10 && drift <= 1e-12;
  return {pass, fmt("%zu runs, %zu steps: max slack / ||f^n||^2 %.3e (limit 1e-10), max relative mass drift %.3e "
                    "(limit 1e-12)",
                    g_runs.size(), steps, slack, drift)};
}

Outcome condition_uniformity() {
  const PhaseMesh mesh{SpatialMesh::uniform(1.0, 51), VelocityMesh::uniform(8.0, 20)};
  const DiscreteMaxwellian M = gaussian_fp(mesh.v);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  double scaled_lo = lo, scaled_hi = 0.0;
  bool converged = true;
  std::string values;
  for (double eps : {0.0, 1e-10, 1e-2, 0.1, 0.5, 1.0}) {
    const SchemeSystem sys({eps, 0.1, Collision::FokkerPlanck, Formulation::OverdeterminedMicroMacro}, mesh, M);
    const auto c = linalg::condition_estimate(sys.normal_matrix(), true);
    const auto s = linalg::condition_estimate(sys.scaled_normal_matrix(), true);
    converged = converged && c.converged;
    lo = std::min(lo, c.value);
    hi = std::max(hi, c.value);
    scaled_lo = std::min(scaled_lo, s.value);
    scaled_hi = std::max(scaled_hi, s.value);
    values += fmt("%s%.3g", values.empty() ? "" : ", ", c.value);
  }
  const double ratio = hi / lo;
  return {ratio <= 1e3, fmt("normal-matrix condition estimates [%s]; max/min %.3f (limit 1e3)%s; "
                            "equilibrated system max/min %.3f",
                            values.c_str(), ratio, converged ? "" : " (iteration cap hit)",
                            scaled_hi / scaled_lo)};
}

Outcome inequality_suites() {
  const VelocityMesh v = VelocityMesh::uniform(8.0, 20);
  const SpatialMesh x = SpatialMesh::uniform(1.0, 51);
  const InequalitySuiteReport g = gaussian_poincare_suite(gaussian_fp(v), 1000, 20240611, 1e-12);
  const InequalitySuiteReport t = torus_poincare_suite(x, 1000, 20240611, 1e-12);
  const double closed_form = 2.0 * std::cos(kPi / 51.0);
  const bool pass = g.violations == 0 && t.violations == 0 && t.extremal_ratio <= 1.0 + 1e-9 &&
                    t.extremal_ratio >= 1.0 - 1e-9 && std::abs(t.k1_ratio - closed_form) <= 1e-12;
  return {pass, fmt("velocity: %zu/%zu violations, worst margin %.3e; torus: %zu/%zu violations, worst margin "
                    "%.3e; rhs/lhs %.15f on the mode attaining the constant (k=25); k=1 cosine %.6f = 2cos(pi/N)",
                    g.violations, g.samples, g.worst_relative_margin, t.violations, t.samples,
                    t.worst_relative_margin, t.extremal_ratio, t.k1_ratio)};
}

Outcome test5_linearity() {
  ExperimentConfig cfg = relaxed(ExperimentConfig::preset("test5"));
  cfg.snapshot_times.clear();
  const TrajectoryResult r = keep(simulate(cfg, 1.0, cfg.R));
  const bool pass = r.rate && r.rate->r_squared >= 0.999;
  return {pass, fmt("rate %.4f, R^2 %.6f on t in [%.2f, %.2f] (limit R^2 >= 0.999)", r.rate ? r.rate->rate : 0.0,
                    r.rate ? r.rate->r_squared : 0.0, r.rate ? r.rate->t_lo : 0.0, r.rate ? r.rate->t_hi : 0.0)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> check;
  Outcome outcome{};
  double seconds = 0.0;
};

}  // namespace

int main() {
  std::vector<Criterion> criteria{
      {1, "scheme equivalence", 1.0, scheme_equivalence},
      {2, "exact diffusion limit", 10.0, diffusion_limit},
      {3, "AP convergence", 60.0, ap_convergence},
      {5, "rate table", 120.0, rate_table},
      {6, "Test 2 rates", 0.0, test2_rates},
      {7, "hypocoercivity certificate", 0.0, certificate},
      {8, "oscillation table", 180.0, oscillations},
      {9, "condition-number uniformity", 0.0, condition_uniformity},
      {10, "inequality suites", 0.0, inequality_suites},
      {11, "non-Gaussian BGK linearity", 300.0, test5_linearity},
      {4, "entropy inequality and mass", 0.0, entropy_inequality},
  };
  for (Criterion& c : criteria) {
    std::fprintf(stderr, "running criterion %d (%s)...\n", c.id, c.name);
    const auto start = std::chrono::steady_clock::now();
    try {
      c.outcome = c.check();
    } catch (const std::exception& e) {
      c.outcome = {false, std::string("exception: ") + e.what()};
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0 && c.seconds > c.budget_seconds) {
      c.outcome.pass = false;
      c.outcome.detail += fmt(" [runtime %.1f s over budget %.0f s]", c.seconds, c.budget_seconds);
    }
  }
  std::sort(criteria.begin(), criteria.end(), [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
  int failures = 0;
  for (const Criterion& c : criteria) {
    std::printf("%s criterion %2d %-30s %7.2fs  %s\n", c.outcome.pass ? "PASS" : "FAIL", c.id, c.name, c.seconds,
                c.outcome.detail.c_str());
    if (!c.outcome.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
