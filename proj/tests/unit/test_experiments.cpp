#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <string>

#include "kinap/csv_output.hpp"
#include "kinap/experiments.hpp"

using namespace kinap;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c = ExperimentConfig::preset("test1");
  c.N = 11;
  c.L = 6;
  c.dt = 0.05;
  c.t_final = 1.0;
  c.epsilons = {1.0, 0.1, 0.0};
  c.heat_times = {0.5, 1.0};
  c.snapshot_times = {0.0, 1.0};
  c.threads = 1;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("presets follow the published experiments") {
  const auto t1 = ExperimentConfig::preset("test1");
  CHECK(t1.collision == Collision::FokkerPlanck);
  CHECK(t1.initial.kind == InitialKind::FarEquilibrium);
  CHECK(t1.N == 51);
  CHECK(t1.L == 20);
  CHECK(t1.v_star == 8.0);
  const auto t4 = ExperimentConfig::preset("test4");
  CHECK(t4.collision == Collision::BGK);
  CHECK(t4.measure_period);
  CHECK(t4.lengths().size() == 4);
  CHECK(t4.lengths()[1] == doctest::Approx(std::numbers::pi / 2));
  const auto t5 = ExperimentConfig::preset("test5");
  CHECK(t5.maxwellian == "nongaussian");
  CHECK(t5.L == 35);
  CHECK(t5.N == 101);
  CHECK(t5.dt == 0.01);
  CHECK_THROWS_AS(ExperimentConfig::preset("test9"), std::invalid_argument);
}

TEST_CASE("configuration text round trips") {
  auto c = small_config();
  c.fit_window = FitWindow{0.2, 0.8};
  const auto back = ExperimentConfig::from_json_text(c.to_json_text());
  CHECK(back.to_json_text() == c.to_json_text());
  CHECK(back.fit_window->t_hi == 0.8);
  CHECK(back.epsilons.size() == 3);
}

TEST_CASE("configuration errors are reported") {
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"tset": "test1"})"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"test": "test1", "N": 50})"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"epsilon": [2.0]})"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"dt": 0.3, "t_final": 1.0})"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"formulation": "direct", "epsilon": 0})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{not json"), std::invalid_argument);
  CHECK_THROWS(ExperimentConfig::load("/nonexistent/kinap.json"));
  const auto c = ExperimentConfig::from_json_text(R"({"test": "test2", "epsilon": 0.5})");
  CHECK(c.epsilons == std::vector<double>{0.5});
  CHECK(c.t_final == ExperimentConfig::preset("test2").t_final);
}

TEST_CASE("simulation keeps every invariant and matches the heat reference at zero epsilon") {
  const auto cfg = small_config();
  const auto summary = run(cfg);
  REQUIRE(summary.runs.size() == 3);
  CHECK(summary.ok());
  for (const auto& r : summary.runs) {
    CHECK(r.violations.empty());
    CHECK(r.records.size() == 21);
    CHECK(r.max_mass_drift <= 1e-12);
    CHECK(r.max_slack_ratio <= 1e-10);
    CHECK(r.snapshots.size() == 2);
    REQUIRE(r.heat.size() == 2);
    CHECK(r.certificate.has_value());
    CHECK(std::isnan(r.records.front().H));
  }
  const auto& zero = summary.runs.back();
  CHECK(zero.epsilon == 0.0);
  for (const auto& h : zero.heat) CHECK(h.error <= 1e-12 * zero.records.front().rho_dev);
  CHECK(summary.runs[1].heat[0].error < summary.runs[0].heat[0].error);
  const auto json = nlohmann::json::parse(summary.to_json_text());
  CHECK(json.contains("runs"));
}

TEST_CASE("strict runs stop at the first violated invariant") {
  auto cfg = small_config();
  cfg.epsilons = {1.0};
  cfg.tolerances.bound = -0.999999;
  CHECK_THROWS_AS(simulate(cfg, 1.0, 1.0), InvariantViolation);
  cfg.strict = false;
  const auto r = simulate(cfg, 1.0, 1.0);
  CHECK_FALSE(r.violations.empty());
}

TEST_CASE("outputs are deterministic") {
  const fs::path base = fs::temp_directory_path() / "kinap_determinism";
  fs::remove_all(base);
  for (const char* name : {"a", "b"}) {
    auto cfg = small_config();
    cfg.epsilons = {1.0, 0.1};
    cfg.threads = 2;
    cfg.output_dir = (base / name).string();
    run(cfg);
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(base / "a")) {
    const fs::path other = base / "b" / entry.path().filename();
    REQUIRE(fs::exists(other));
    if (entry.path().filename() == "summary.json") continue;
    CHECK(slurp(entry.path()) == slurp(other));
    ++files;
  }
  CHECK(files >= 6);
  const std::string diag = slurp(base / "a" / "diagnostics_eps_1_R_1.csv");
  CHECK(diag.rfind(csv::kSchemaLine, 0) == 0);
  CHECK(diag.find("n,t,norm_to_eq,norm_local,rho_dev,h_norm,H,mass,slack") != std::string::npos);
  fs::remove_all(base);
}

TEST_CASE("CSV number formatting round trips") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0}) {
    CHECK(std::stod(csv::format_double(v)) == v);
  }
  std::ostringstream out;
  csv::write_diagnostics(out, std::vector<DiagnosticsRecord>{{}}, {{"epsilon", "1"}});
  const std::string text = out.str();
  CHECK(text.rfind("# kinetic-ap-lab v1\n# epsilon=1\n", 0) == 0);
  CHECK_THROWS(csv::write_file("/nonexistent/dir/file.csv", [](std::ostream& o) { o << "x"; }));
}
