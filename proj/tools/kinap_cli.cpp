#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kinap/diagnostics.hpp"
#include "kinap/equilibrium.hpp"
#include "kinap/experiments.hpp"
#include "kinap/inequalities.hpp"

namespace {

struct Common {
  std::string config;
  std::string test;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<double> epsilons;
  bool lenient = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON experiment configuration");
  cmd->add_option("--test", c.test, "preset: test1..test5 or custom");
  cmd->add_option("--out", c.out, "output directory for CSV streams and summary.json");
  cmd->add_option("--seed", c.seed, "seed for random initial data");
  cmd->add_option("--epsilon", c.epsilons, "comma-separated epsilon list")->delimiter(',');
  cmd->add_flag("--lenient", c.lenient, "record invariant violations instead of stopping");
}

kinap::ExperimentConfig build_config(const Common& c) {
  if (!c.config.empty() && !c.test.empty()) {
    throw std::invalid_argument("--config and --test are mutually exclusive");
  }
  kinap::ExperimentConfig cfg = !c.config.empty() ? kinap::ExperimentConfig::load(c.config)
                                                  : kinap::ExperimentConfig::preset(
                                                        c.test.empty() ? "custom" : c.test);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.seed) cfg.seed = *c.seed;
  if (!c.epsilons.empty()) cfg.epsilons = c.epsilons;
  if (c.lenient) cfg.strict = false;
  cfg.validate();
  return cfg;
}

void print_table(const kinap::ExperimentSummary& s) {
  std::printf("%-10s %-10s %-12s %-10s %-10s %-10s %s\n", "epsilon", "R", "rate", "R^2",
              "period", "R*nu", "status");
  for (const auto& r : s.runs) {
    char rate[32] = "-", r2[32] = "-", period[32] = "-", rnu[32] = "-";
    if (r.rate) {
      std::snprintf(rate, sizeof rate, "%.4f", r.rate->rate);
      std::snprintf(r2, sizeof r2, "%.6f", r.rate->r_squared);
    }
    if (r.period) {
      std::snprintf(period, sizeof period, "%.4f", r.period->period);
      std::snprintf(rnu, sizeof rnu, "%.4f", r.R / r.period->period);
    }
    std::printf("%-10.3g %-10.4g %-12s %-10s %-10s %-10s %s\n", r.epsilon, r.R, rate, r2, period,
                rnu, r.violations.empty() ? "ok" : "VIOLATION");
    for (const auto& h : r.heat) {
      std::printf("    heat comparison t=%-6g ||rho - rho_heat||_2 = %.6e\n", h.t, h.error);
    }
    for (const auto& v : r.violations) std::printf("    %s\n", v.c_str());
  }
}

int run_experiment(const Common& c, bool sweep) {
  kinap::ExperimentConfig cfg = build_config(c);
  if (!sweep) {
    cfg.epsilons.resize(1);
    const double r = cfg.lengths().front();
    if (cfg.x_widths.empty()) {
      cfg.torus_lengths.clear();
      cfg.R = r;
    }
  }
  const kinap::ExperimentSummary summary = kinap::run(cfg);
  print_table(summary);
  if (!cfg.output_dir.empty()) std::printf("wrote %s/summary.json\n", cfg.output_dir.c_str());
  return summary.ok() ? 0 : 3;
}

int run_verify(std::size_t samples, std::uint64_t seed, double v_star, int L, double R, int N) {
  const kinap::VelocityMesh v = kinap::VelocityMesh::uniform(v_star, L);
  const kinap::SpatialMesh x = kinap::SpatialMesh::uniform(R, N);
  const kinap::DiscreteMaxwellian M = kinap::gaussian_fp(v);
  const auto g = kinap::gaussian_poincare_suite(M, samples, seed);
  const auto t = kinap::torus_poincare_suite(x, samples, seed + 1);
  std::printf("gaussian poincare: %zu samples, %zu violations, worst relative margin %.3e\n",
              g.samples, g.violations, g.worst_relative_margin);
  std::printf("torus poincare:    %zu samples, %zu violations, worst relative margin %.3e\n",
              t.samples, t.violations, t.worst_relative_margin);
  std::printf("torus extremal mode rhs/lhs = %.15f, k=1 mode rhs/lhs = %.15f\n", t.extremal_ratio,
              t.k1_ratio);
  std::printf("discrete moments: m0=%.15g m2=%.15g m4=%.15g\n", M.m0(), M.m2(), M.m4());
  return g.violations == 0 && t.violations == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic-preserving solver for the 1D linear kinetic equation"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts;
  auto* run = app.add_subcommand("run", "run the first (epsilon, R) entry of an experiment");
  add_common(run, run_opts);
  auto* sweep = app.add_subcommand("sweep", "run every (epsilon, R) entry concurrently");
  add_common(sweep, sweep_opts);

  std::size_t samples = 1000;
  std::uint64_t seed = 20240611;
  double v_star = 8.0, R = 1.0;
  int L = 20, N = 51;
  auto* verify = app.add_subcommand("verify", "check the discrete Poincare inequalities");
  verify->add_option("--samples", samples, "random inputs per inequality");
  verify->add_option("--seed", seed, "seed for the random inputs");
  verify->add_option("--v-star", v_star, "velocity box half-width");
  verify->add_option("--L", L, "velocity cells per half line");
  verify->add_option("--R", R, "torus length");
  verify->add_option("--N", N, "spatial cells (odd)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return run_experiment(run_opts, false);
    if (*sweep) return run_experiment(sweep_opts, true);
    return run_verify(samples, seed, v_star, L, R, N);
  } catch (const kinap::InvariantViolation& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
