#include "kinap/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "kinap/csv_output.hpp"

namespace kinap {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t steps_for(double t, double dt) {
  return static_cast<std::size_t>(std::llround(t / dt));
}

bool on_grid(double t, double dt) {
  const double n = std::round(t / dt);
  return n >= 0.0 && std::abs(n * dt - t) <= 1e-9 * std::max(1.0, std::abs(t));
}

}  // namespace

// ---------------------------------------------------------------------------
// configuration

ExperimentConfig ExperimentConfig::preset(const std::string& test) {
  ExperimentConfig c;
  c.test = test;
  if (test == "custom") return c;
  if (test == "test1") {
    c.dt = 0.05;
    c.t_final = 10.0;
    c.epsilons = {1.0, 0.5, 0.1, 0.01, 0.0};
    c.initial.kind = InitialKind::FarEquilibrium;
    c.heat_times = {0.05, 0.1, 0.15, 10.0};
    c.snapshot_times = {0.05, 0.1, 0.15, 10.0};
    return c;
  }
  if (test == "test2") {
    c.t_final = 30.0;
    c.epsilons = {1.0};
    c.initial.kind = InitialKind::RandomTruncated;
    c.snapshot_times = {0.0, 0.3, 0.6, 30.0};
    return c;
  }
  if (test == "test3") {
    c.t_final = 20.0;
    c.epsilons = {1.0, 0.8, 0.5, 0.1, 1e-2, 1e-10, 0.0};
    c.initial.kind = InitialKind::RandomUniform;
    return c;
  }
  if (test == "test4") {
    c.collision = Collision::BGK;
    c.t_final = 80.0;
    c.epsilons = {1.0};
    c.torus_lengths = {kPi / 4.0, kPi / 2.0, kPi, 1.5 * kPi};
    c.initial.kind = InitialKind::CloseEquilibrium;
    c.measure_period = true;
    return c;
  }
  if (test == "test5") {
    c.collision = Collision::BGK;
    c.maxwellian = "nongaussian";
    c.L = 35;
    c.N = 101;
    c.dt = 0.01;
    c.t_final = 40.0;
    c.epsilons = {1.0};
    c.initial.kind = InitialKind::FarEquilibrium;
    c.snapshot_times = {0.0, 40.0};
    return c;
  }
  throw std::invalid_argument("unknown test id '" + test + "'");
}

namespace {

template <class T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) ==
        known.end()) {
      throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
    }
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  reject_unknown_keys(j,
                      {"test", "v_star", "L", "R", "N", "v_interfaces", "x_widths", "dt",
                       "t_final", "epsilon", "torus_lengths", "collision", "formulation",
                       "maxwellian", "maxwellian_file", "initial", "seed", "output_dir",
                       "snapshot_times", "heat_times", "fit_window", "measure_period",
                       "period_floor", "transient_fraction",
                       "track_entropy", "strict", "threads", "tolerances"},
                      "config");
  try {
    ExperimentConfig c = preset(j.value("test", std::string("custom")));
    read_if(j, "v_star", c.v_star);
    read_if(j, "L", c.L);
    read_if(j, "R", c.R);
    read_if(j, "N", c.N);
    read_if(j, "v_interfaces", c.v_interfaces);
    read_if(j, "x_widths", c.x_widths);
    read_if(j, "dt", c.dt);
    read_if(j, "t_final", c.t_final);
    if (j.contains("epsilon")) {
      const json& e = j.at("epsilon");
      c.epsilons = e.is_array() ? e.get<std::vector<double>>() : std::vector<double>{e.get<double>()};
    }
    read_if(j, "torus_lengths", c.torus_lengths);
    if (j.contains("collision")) c.collision = collision_from_string(j.at("collision").get<std::string>());
    if (j.contains("formulation")) {
      c.formulation = formulation_from_string(j.at("formulation").get<std::string>());
    }
    read_if(j, "maxwellian", c.maxwellian);
    read_if(j, "maxwellian_file", c.maxwellian_file);
    if (j.contains("initial")) {
      const json& in = j.at("initial");
      if (in.is_string()) {
        c.initial = InitialData{};
        c.initial.kind = initial_kind_from_string(in.get<std::string>());
      } else {
        reject_unknown_keys(in, {"kind", "truncation", "path"}, "initial");
        c.initial = InitialData{};
        c.initial.kind = initial_kind_from_string(in.at("kind").get<std::string>());
        read_if(in, "truncation", c.initial.truncation);
        read_if(in, "path", c.initial.path);
      }
    }
    read_if(j, "seed", c.seed);
    read_if(j, "output_dir", c.output_dir);
    read_if(j, "snapshot_times", c.snapshot_times);
    read_if(j, "heat_times", c.heat_times);
    if (j.contains("fit_window")) {
      const json& w = j.at("fit_window");
      if (w.is_null()) {
        c.fit_window.reset();
      } else {
        const auto v = w.get<std::vector<double>>();
        if (v.size() != 2) throw std::invalid_argument("config: fit_window needs [t_lo, t_hi]");
        c.fit_window = FitWindow{v[0], v[1]};
      }
    }
    read_if(j, "measure_period", c.measure_period);
    read_if(j, "period_floor", c.period_floor);
    read_if(j, "transient_fraction", c.transient_fraction);
    read_if(j, "track_entropy", c.track_entropy);
    read_if(j, "strict", c.strict);
    read_if(j, "threads", c.threads);
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      reject_unknown_keys(t, {"mass", "slack", "constraint", "entropy", "bound"}, "tolerances");
      read_if(t, "mass", c.tolerances.mass);
      read_if(t, "slack", c.tolerances.slack);
      read_if(t, "constraint", c.tolerances.constraint);
      read_if(t, "entropy", c.tolerances.entropy);
      read_if(t, "bound", c.tolerances.bound);
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["test"] = test;
  j["v_star"] = v_star;
  j["L"] = L;
  j["R"] = R;
  j["N"] = N;
  if (!v_interfaces.empty()) j["v_interfaces"] = v_interfaces;
  if (!x_widths.empty()) j["x_widths"] = x_widths;
  j["dt"] = dt;
  j["t_final"] = t_final;
  j["epsilon"] = epsilons;
  j["torus_lengths"] = lengths();
  j["collision"] = to_string(collision);
  j["formulation"] = to_string(formulation);
  j["maxwellian"] = maxwellian;
  if (!maxwellian_file.empty()) j["maxwellian_file"] = maxwellian_file;
  j["initial"] = {{"kind", to_string(initial.kind)}, {"truncation", initial.truncation}};
  if (!initial.path.empty()) j["initial"]["path"] = initial.path;
  j["seed"] = seed;
  j["snapshot_times"] = snapshot_times;
  j["heat_times"] = heat_times;
  j["fit_window"] = fit_window ? json::array({fit_window->t_lo, fit_window->t_hi}) : json(nullptr);
  j["measure_period"] = measure_period;
  j["period_floor"] = period_floor;
  j["transient_fraction"] = transient_fraction;
  j["track_entropy"] = track_entropy;
  return j.dump(2);
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (v_interfaces.empty() && (!(v_star > 0.0) || L < 1)) fail("need v_star > 0 and L >= 1");
  if (x_widths.empty() && (!(R > 0.0) || N < 1)) fail("need R > 0 and N >= 1");
  if (x_widths.empty() && N % 2 == 0) fail("N must be odd for the torus Poisson problem");
  if (!x_widths.empty() && !torus_lengths.empty()) {
    fail("torus_lengths cannot be combined with explicit x_widths");
  }
  for (double r : torus_lengths) {
    if (!(r > 0.0)) fail("torus lengths must be positive");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) fail("t_final must be nonnegative");
  if (!on_grid(t_final, dt)) fail("t_final must be a multiple of dt");
  if (epsilons.empty()) fail("epsilon list is empty");
  for (double e : epsilons) {
    if (!(e >= 0.0 && e <= 1.0)) fail("epsilon values must lie in [0, 1]");
    SchemeConfig sc{e, dt, collision, formulation};
    sc.validate();
  }
  if (maxwellian != "gaussian" && maxwellian != "nongaussian" && maxwellian != "file") {
    fail("maxwellian must be gaussian, nongaussian or file");
  }
  if (maxwellian == "file" && maxwellian_file.empty()) fail("maxwellian_file is missing");
  if (maxwellian == "nongaussian" && collision != Collision::BGK) {
    fail("the non-Gaussian equilibrium is only defined for the BGK operator");
  }
  if (initial.kind == InitialKind::File && initial.path.empty()) fail("initial.path is missing");
  for (double t : snapshot_times) {
    if (!on_grid(t, dt) || t > t_final) fail("snapshot times must be multiples of dt in [0, t_final]");
  }
  for (double t : heat_times) {
    if (!on_grid(t, dt) || t > t_final) fail("heat times must be multiples of dt in [0, t_final]");
  }
  if (fit_window && !(fit_window->t_hi > fit_window->t_lo)) fail("fit_window must be increasing");
  if (!(period_floor > 0.0 && period_floor < 1.0)) fail("period_floor must lie in (0, 1)");
  if (!(transient_fraction >= 0.0 && transient_fraction < 1.0)) {
    fail("transient_fraction must lie in [0, 1)");
  }
}

std::vector<double> ExperimentConfig::lengths() const {
  if (!x_widths.empty()) {
    double r = 0.0;
    for (double w : x_widths) r += w;
    return {r};
  }
  return torus_lengths.empty() ? std::vector<double>{R} : torus_lengths;
}

PhaseMesh ExperimentConfig::phase_mesh(double length) const {
  VelocityMesh v = v_interfaces.empty() ? VelocityMesh::uniform(v_star, L)
                                        : VelocityMesh::from_interfaces(v_interfaces);
  SpatialMesh x = x_widths.empty() ? SpatialMesh::uniform(length, N)
                                   : SpatialMesh::from_widths(x_widths);
  return PhaseMesh{std::move(x), std::move(v)};
}

DiscreteMaxwellian ExperimentConfig::equilibrium(const VelocityMesh& v) const {
  if (maxwellian == "file") return load_maxwellian(v, maxwellian_file);
  if (maxwellian == "nongaussian") return nongaussian_bgk(v);
  return collision == Collision::BGK ? gaussian_bgk(v) : gaussian_fp(v);
}

SchemeConfig ExperimentConfig::scheme(double epsilon) const {
  SchemeConfig sc{epsilon, dt, collision, formulation};
  sc.validate();
  return sc;
}

// ---------------------------------------------------------------------------
// simulation

std::vector<double> TrajectoryResult::times() const { return series(&DiagnosticsRecord::t); }

std::vector<double> TrajectoryResult::series(double DiagnosticsRecord::*field) const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.*field);
  return out;
}

namespace {

double constraint_defect(const MicroMacroState& s, const PhaseMesh& mesh,
                         const DiscreteMaxwellian& M) {
  const std::size_t nv = mesh.nv();
  double worst = 0.0;
  double scale = 1.0;
  for (double value : s.h) scale = std::max(scale, std::abs(value));
  for (std::size_t i = 0; i < s.nx(); ++i) {
    double mean = 0.0;
    for (std::size_t a = 0; a < nv; ++a) mean += mesh.v.width(a) * M.cell(a) * s.h[i * nv + a];
    worst = std::max(worst, std::abs(mean));
  }
  return worst / scale;
}

class Violations {
public:
  Violations(TrajectoryResult& r, bool strict) : r_(r), strict_(strict) {}

  void check(bool ok, std::size_t n, const char* what, double value, double limit) {
    if (ok) return;
    char buf[200];
    std::snprintf(buf, sizeof buf, "step %zu: %s %.6e exceeds %.3e (epsilon=%g, R=%g)", n, what,
                  value, limit, r_.epsilon, r_.R);
    if (strict_) throw InvariantViolation(buf);
    if (r_.violations.size() < 20) r_.violations.emplace_back(buf);
  }

private:
  TrajectoryResult& r_;
  bool strict_;
};

}  // namespace

TrajectoryResult simulate(const ExperimentConfig& cfg, double epsilon, double R) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  TrajectoryResult result;
  result.epsilon = epsilon;
  result.R = R;
  Violations guard(result, cfg.strict);
  const InvariantTolerances& tol = cfg.tolerances;

  const PhaseMesh mesh = cfg.phase_mesh(R);
  const DiscreteMaxwellian M = cfg.equilibrium(mesh.v);
  const SchemeConfig sc = cfg.scheme(epsilon);
  const CellDistribution f0 = generate_initial(cfg.initial, mesh, M, cfg.seed);
  MicroMacroState state = init_state(f0, mesh, M, sc);

  std::optional<SchemeSystem> system;
  std::optional<DirectScheme> direct;
  CellDistribution f = f0;
  if (sc.formulation == Formulation::Direct) {
    direct.emplace(sc, mesh, M);
  } else {
    system.emplace(sc, mesh, M);
  }

  std::optional<ModifiedEntropyTracker> tracker;
  if (cfg.track_entropy && mesh.nx() % 2 == 1) {
    const EntropyConfig cert = compute_eta_admissible(M, torus_poincare_constant(mesh.x), cfg.dt);
    result.certificate = cert;
    tracker.emplace(cert, epsilon, cfg.dt, mesh, M);
  }

  auto rho_deviation = [&](const MicroMacroState& s) {
    std::vector<double> dev(s.nx());
    const std::size_t nv = mesh.nv();
    for (std::size_t i = 0; i < s.nx(); ++i) {
      double hbar = 0.0;
      for (std::size_t a = 0; a < nv; ++a) hbar += mesh.v.width(a) * M.cell(a) * s.h[i * nv + a];
      dev[i] = s.lambda[i] + epsilon * hbar;
    }
    return dev;
  };
  auto centered = [&](std::vector<double> g) {
    double mean = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) mean += mesh.x.width(i) * g[i];
    mean /= mesh.x.length();
    for (double& value : g) value -= mean;
    return g;
  };
  std::optional<HeatScheme> heat;
  std::vector<double> heat_dev;
  if (!cfg.heat_times.empty()) {
    heat.emplace(mesh.x, M.m2(), cfg.dt);
    heat_dev = rho_deviation(state);
  }

  auto compare_heat = [&](std::size_t n, const MicroMacroState& s) {
    for (double t : cfg.heat_times) {
      if (steps_for(t, cfg.dt) != n) continue;
      const std::vector<double> dev = rho_deviation(s);
      std::vector<double> diff(dev.size());
      for (std::size_t i = 0; i < dev.size(); ++i) diff[i] = dev[i] - heat_dev[i];
      result.heat.push_back({t, l2_norm(centered(diff), mesh.x),
                             l2_norm(centered(heat_dev), mesh.x)});
    }
  };
  auto take_snapshot = [&](std::size_t n, const MicroMacroState& s) {
    for (double t : cfg.snapshot_times) {
      if (steps_for(t, cfg.dt) != n) continue;
      Snapshot snap;
      snap.t = static_cast<double>(n) * cfg.dt;
      snap.f = (n == 0) ? f0 : reconstruct(s, M, epsilon);
      snap.macro = moments(s, mesh, M, epsilon);
      if (n == 0 && epsilon > 0.0) snap.macro = moments(f0, mesh, M, epsilon);
      result.snapshots.push_back(std::move(snap));
      break;
    }
  };

  // Norms of the true initial datum; for epsilon = 0 the state only keeps
  // its projection onto equilibria.
  CellDistribution dev0 = f0;
  for (std::size_t i = 0; i < mesh.nx(); ++i) {
    for (std::size_t a = 0; a < mesh.nv(); ++a) dev0(i, a) -= state.mu * M.cell(a);
  }
  const double norm0 = weighted_norm(dev0, mesh, M);

  StateNorms norms = state_norms(state, mesh, M, epsilon);
  const double mass0 = total_mass(f0, mesh);
  DiagnosticsRecord rec0{0,
                         0.0,
                         norm0,
                         local_deviation(f0, mesh, M),
                         norms.rho_dev,
                         norms.h,
                         std::numeric_limits<double>::quiet_NaN(),
                         mass0,
                         std::numeric_limits<double>::quiet_NaN()};
  result.records.push_back(rec0);
  if (tracker) tracker->update(state);
  compare_heat(0, state);
  take_snapshot(0, state);

  const std::size_t steps = steps_for(cfg.t_final, cfg.dt);
  std::optional<double> H_prev;
  for (std::size_t n = 1; n <= steps; ++n) {
    MicroMacroState next;
    if (direct) {
      f = direct->step(f);
      next = decompose(f, mesh, M, epsilon);
    } else {
      next = system->step(state);
    }
    const StateNorms next_norms = state_norms(next, mesh, M, epsilon);
    const double t = static_cast<double>(n) * cfg.dt;

    const double slack = entropy_slack(state, next, epsilon, cfg.dt, mesh, M);
    const double slack_ratio = slack / (norms.full * norms.full);
    result.max_slack_ratio = std::max(result.max_slack_ratio, slack_ratio);
    guard.check(slack_ratio <= tol.slack, n, "entropy slack ratio", slack_ratio, tol.slack);

    const double drift = std::abs(next_norms.mass - mass0) / std::abs(mass0);
    result.max_mass_drift = std::max(result.max_mass_drift, drift);
    guard.check(drift <= tol.mass, n, "relative mass drift", drift, tol.mass);

    if (!direct) {
      const double defect = constraint_defect(next, mesh, M);
      result.max_constraint = std::max(result.max_constraint, defect);
      guard.check(defect <= tol.constraint, n, "mean-free constraint defect", defect,
                  tol.constraint);
    }

    double H = std::numeric_limits<double>::quiet_NaN();
    if (tracker) {
      H = *tracker->update(next);
      if (H_prev && *H_prev != 0.0) {
        const double rise = (H - *H_prev) / std::abs(*H_prev);
        result.max_entropy_increase = std::max(result.max_entropy_increase, rise);
        guard.check(rise <= tol.entropy, n, "modified entropy increase", rise, tol.entropy);
      }
      H_prev = H;
      const EntropyConfig& c = *result.certificate;
      const double bound = c.C * std::exp(-0.5 * c.beta * t) * norm0;
      if (bound > 0.0) {
        const double ratio = next_norms.to_equilibrium / bound;
        result.max_bound_ratio = std::max(result.max_bound_ratio, ratio);
        guard.check(ratio <= 1.0 + tol.bound, n, "certificate bound ratio", ratio,
                    1.0 + tol.bound);
      }
    }

    if (heat) {
      heat_dev = centered(heat->step(heat_dev));
      compare_heat(n, next);
    }

    result.records.push_back({n, t, next_norms.to_equilibrium, next_norms.local,
                              next_norms.rho_dev, next_norms.h, H, next_norms.mass, slack});
    take_snapshot(n, next);
    state = std::move(next);
    norms = next_norms;
  }

  const std::vector<double> times = result.times();
  if (times.size() >= 4) {
    try {
      result.rate = fit_decay_rate(times, result.series(&DiagnosticsRecord::norm_to_eq),
                                   cfg.fit_window, cfg.transient_fraction);
    } catch (const std::invalid_argument&) {
    }
  }
  if (cfg.measure_period) {
    try {
      result.period =
          estimate_oscillation_period(times, result.series(&DiagnosticsRecord::rho_dev),
                                      cfg.period_floor, cfg.transient_fraction);
    } catch (const std::invalid_argument&) {
    }
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------
// driver

bool ExperimentSummary::ok() const {
  return std::all_of(runs.begin(), runs.end(),
                     [](const TrajectoryResult& r) { return r.violations.empty(); });
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string run_tag(const TrajectoryResult& r) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "eps_%.6g_R_%.6g", r.epsilon, r.R);
  return buf;
}

}  // namespace

std::string ExperimentSummary::to_json_text() const {
  json j;
  j["schema"] = "kinetic-ap-lab v1";
  j["test"] = config.test;
  j["seed"] = config.seed;
  j["config"] = json::parse(config.to_json_text());
  j["ok"] = ok();
  json runs_json = json::array();
  for (const auto& r : runs) {
    json e;
    e["epsilon"] = r.epsilon;
    e["R"] = r.R;
    e["steps"] = r.records.empty() ? 0 : r.records.back().n;
    if (r.rate) {
      e["rate"] = r.rate->rate;
      e["r_squared"] = r.rate->r_squared;
      e["fit_points"] = r.rate->points;
      e["fit_window"] = {r.rate->t_lo, r.rate->t_hi};
    } else {
      e["rate"] = nullptr;
    }
    if (r.period) {
      e["period"] = r.period->period;
      e["R_nu"] = r.R / r.period->period;
      e["maxima"] = r.period->maxima.size();
    }
    if (!r.heat.empty()) {
      json h = json::array();
      for (const auto& c : r.heat) {
        h.push_back({{"t", c.t}, {"error", c.error}, {"heat_norm", c.heat_norm}});
      }
      e["heat_comparison"] = h;
    }
    if (r.certificate) {
      const auto& c = *r.certificate;
      e["certificate"] = {{"eta", c.eta}, {"C_P", c.C_P},   {"beta", c.beta},
                          {"C", c.C},     {"lower", c.lower}, {"upper", c.upper}};
      e["max_entropy_increase"] = finite_or_null(r.max_entropy_increase);
      e["max_bound_ratio"] = r.max_bound_ratio;
    }
    e["max_slack_ratio"] = finite_or_null(r.max_slack_ratio);
    e["max_mass_drift"] = r.max_mass_drift;
    e["max_constraint_defect"] = r.max_constraint;
    e["violations"] = r.violations;
    e["final_norm_to_eq"] = r.records.empty() ? 0.0 : r.records.back().norm_to_eq;
    runs_json.push_back(e);
  }
  j["runs"] = runs_json;
  return j.dump(2) + "\n";
}

ExperimentSummary run(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::pair<double, double>> jobs;
  for (double e : cfg.epsilons) {
    for (double r : cfg.lengths()) jobs.emplace_back(e, r);
  }
  unsigned width = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  width = std::max(1u, width);

  ExperimentSummary summary;
  summary.config = cfg;
  summary.runs.resize(jobs.size());
  for (std::size_t begin = 0; begin < jobs.size(); begin += width) {
    const std::size_t end = std::min(jobs.size(), begin + width);
    std::vector<std::future<TrajectoryResult>> batch;
    for (std::size_t k = begin; k < end; ++k) {
      batch.push_back(std::async(std::launch::async, simulate, std::cref(cfg), jobs[k].first,
                                 jobs[k].second));
    }
    for (std::size_t k = begin; k < end; ++k) summary.runs[k] = batch[k - begin].get();
  }
  if (!cfg.output_dir.empty()) write_outputs(summary);
  return summary;
}

void write_outputs(const ExperimentSummary& summary) {
  const ExperimentConfig& cfg = summary.config;
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  for (const auto& r : summary.runs) {
    const std::string tag = run_tag(r);
    const csv::Metadata meta{{"test", cfg.test},
                             {"seed", std::to_string(cfg.seed)},
                             {"epsilon", csv::format_double(r.epsilon)},
                             {"R", csv::format_double(r.R)},
                             {"collision", to_string(cfg.collision)},
                             {"formulation", to_string(cfg.formulation)},
                             {"initial", to_string(cfg.initial.kind)}};
    csv::write_file((dir / ("diagnostics_" + tag + ".csv")).string(),
                    [&](std::ostream& out) { csv::write_diagnostics(out, r.records, meta); });
    const PhaseMesh mesh = cfg.phase_mesh(r.R);
    for (const auto& s : r.snapshots) {
      char t_buf[40];
      std::snprintf(t_buf, sizeof t_buf, "_t_%.6g", s.t);
      csv::Metadata snap_meta = meta;
      snap_meta.emplace_back("t", csv::format_double(s.t));
      csv::write_file((dir / ("f_" + tag + t_buf + ".csv")).string(), [&](std::ostream& out) {
        csv::write_distribution(out, s.f, mesh, snap_meta);
      });
      csv::write_file((dir / ("macro_" + tag + t_buf + ".csv")).string(),
                      [&](std::ostream& out) { csv::write_macro(out, s.macro, mesh.x, snap_meta); });
    }
  }
  csv::write_file((dir / "summary.json").string(),
                  [&](std::ostream& out) { out << summary.to_json_text(); });
}

}  // namespace kinap
