#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "rantsim/harness.hpp"

using namespace rantsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() /
                     ("rantsim_harness_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConfigMap parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

// a few agents, a couple of minutes, frequent snapshots
ConfigMap short_construction() {
  return parse(
      "scenario.mode = construction\n"
      "scenario.snapshot_interval = 10\n"
      "sim.total_time = 40\n"
      "world.n_agents = 4\n"
      "world.n_elements = 60\n"
      "world.early_stop_window = 0\n");
}

}  // namespace

TEST_CASE("config text: comments, sections, dotted keys") {
  const auto cfg = parse(
      "# leading comment\n"
      "; another\n"
      "behavior.C = 0.5\n"
      "[sim]\n"
      "dt = 0.01   \n");
  CHECK(cfg.size() == 2);
  CHECK(cfg.at("behavior.C") == "0.5");
  CHECK(cfg.at("sim.dt") == "0.01");
  CHECK_THROWS_AS(parse("[broken\n"), ConfigError);
}

TEST_CASE("scenario from config applies values and mode defaults") {
  const Scenario s = scenario_from_config(parse(
      "scenario.mode = construction\nbehavior.C = 0.25\nsim.total_time = 30\n"
      "world.detect_half_angle_deg = 30\nscenario.seeds = 3, 4\n"));
  CHECK(s.mode == ScenarioMode::construction);
  CHECK(s.world.behavior.C == 0.25);
  CHECK(s.world.sim.total_time == 30.0);
  CHECK(s.world.detect_half_angle == doctest::Approx(kPi / 6.0));
  CHECK(s.seeds == std::vector<std::uint64_t>{3, 4});

  const Scenario d = scenario_from_config(parse("scenario.mode = deconstruction\n"));
  CHECK(d.world.behavior.K == -1.0);
  CHECK(d.world.layout == ElementLayout::layers);
  CHECK(d.world.seed_photormone);
}

TEST_CASE("unknown keys and bad values name the field") {
  auto message = [](const std::string& text) {
    try {
      scenario_from_config(parse(text));
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("behavior.Cc = 1\n").find("behavior.Cc") != std::string::npos);
  CHECK(message("behavior.C = abc\n").find("behavior.C") != std::string::npos);
  CHECK(message("world.n_agents = 2.5\n").find("world.n_agents") != std::string::npos);
  CHECK(message("behavior.thresholds = maybe\n").find("behavior.thresholds") != std::string::npos);
  CHECK(message("scenario.mode = flying\n").find("flying") != std::string::npos);
  CHECK(message("sim.dt = -1\n") != "no error");
}

TEST_CASE("overrides") {
  ConfigMap cfg = parse("behavior.C = 1\n");
  apply_override(cfg, "behavior.C=0.75");
  apply_override(cfg, " sim.total_time = 12 ");
  CHECK(cfg.at("behavior.C") == "0.75");
  CHECK(cfg.at("sim.total_time") == "12");
  CHECK_THROWS_AS(apply_override(cfg, "novalue"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "=3"), ConfigError);
}

TEST_CASE("config echo round trips") {
  const Scenario s = scenario_from_config(parse(
      "scenario.mode = robustness_2x2\nbehavior.c_bar = 1.75\nphase.L_w = 1.5, 2.5\n"
      "world.detect_half_angle_deg = 20\n"));
  const ConfigMap echo = scenario_to_config(s);
  CHECK(echo.size() == known_keys().size());
  const Scenario back = scenario_from_config(echo);
  CHECK(scenario_to_config(back) == echo);
  CHECK(back.world.behavior.c_bar == 1.75);
  CHECK(back.phase.L_w == std::vector<double>{1.5, 2.5});
  CHECK(back.world.detect_half_angle == doctest::Approx(s.world.detect_half_angle).epsilon(1e-14));
}

TEST_CASE("world run writes its artifacts and is deterministic") {
  const Scenario s = scenario_from_config(short_construction());
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const RunSummary ra = run_scenario(s, 11, a);
  run_scenario(s, 11, b);
  for (const char* f : {"config.txt", "summary.json", "metrics.csv", "events.csv"})
    CHECK(fs::exists(a / f));
  CHECK_FALSE(fs::exists(a.string() + ".partial"));
  CHECK(slurp(a / "metrics.csv") == slurp(b / "metrics.csv"));
  CHECK(slurp(a / "events.csv") == slurp(b / "events.csv"));
  CHECK(ra.values.at("t_end") == doctest::Approx(40.0));
  CHECK(ra.values.at("net_flux") ==
        ra.values.at("elements_in_area_end") - ra.values.at("elements_in_area_start"));

  // five snapshot rows: t = 0, 10, 20, 30, 40
  std::ifstream m(a / "metrics.csv");
  int lines = 0;
  for (std::string l; std::getline(m, l);) ++lines;
  CHECK(lines == 6);

  const fs::path c = scratch("det_c");
  run_scenario(s, 12, c);
  CHECK(slurp(a / "metrics.csv") != slurp(c / "metrics.csv"));
}

TEST_CASE("the config echo reproduces the run") {
  const Scenario s = scenario_from_config(short_construction());
  const fs::path a = scratch("echo_a"), b = scratch("echo_b");
  run_scenario(s, 5, a);
  run_scenario(scenario_from_config(load_config(a / "config.txt")), 5, b);
  CHECK(slurp(a / "metrics.csv") == slurp(b / "metrics.csv"));
}

TEST_CASE("metrics recomputed from snapshots match the run") {
  // layered substrate so there is structure inside the area to measure
  ConfigMap cfg = short_construction();
  cfg["scenario.mode"] = "deconstruction";
  cfg.erase("world.n_elements");
  const fs::path a = scratch("recompute");
  const RunSummary r = run_scenario(scenario_from_config(cfg), 3, a);
  REQUIRE(r.values.at("n_c") > 0.0);
  std::ostringstream os;
  recompute_metrics(a, os);
  CHECK(os.str() == slurp(a / "metrics.csv"));
  CHECK_THROWS_AS(recompute_metrics(scratch("missing"), os), std::exception);
}

TEST_CASE("robustness cases map to threshold and C") {
  ConfigMap cfg = short_construction();
  cfg["scenario.mode"] = "robustness_2x2";
  const fs::path a = scratch("robust");
  const RunSummary r = run_scenario(scenario_from_config(cfg), 2, a);
  std::ifstream m(a / "metrics.csv");
  std::string header, row;
  std::getline(m, header);
  CHECK(header.rfind("case,threshold,C,t,", 0) == 0);
  std::vector<std::string> prefixes;
  while (std::getline(m, row)) prefixes.push_back(row.substr(0, row.find(',', row.find(',') + 1) + 2));
  CHECK(prefixes == std::vector<std::string>{"A,0,0", "B,0,1", "C,1,1", "D,1,0"});
  for (const char* c : {"A", "B", "C", "D"}) {
    CHECK(r.values.count(std::string(c) + ".n_c") == 1);
    CHECK(fs::exists(a / (std::string("case_") + c) / "metrics.csv"));
  }
}

TEST_CASE("constant gradient mode fits r = v_o/(G lambda)") {
  const Scenario s = scenario_from_config(parse(
      "scenario.mode = constant_gradient\ncg.lambda_factors = 0.5, 2\ncg.t_end = 100\n"
      "cg.dt = 0.005\n"));
  const RunSummary r = run_scenario(s, 1, scratch("cg"));
  CHECK(r.values.at("loglog_slope") == doctest::Approx(-1.0).epsilon(0.02));
  CHECK(r.values.at("max_rel_dev_rG") < 0.02);
}

TEST_CASE("continuum mode conserves agent mass") {
  const Scenario s = scenario_from_config(parse(
      "scenario.mode = continuum\ncontinuum.preset = construction\ncontinuum.t_end = 0.2\n"
      "continuum.snapshot_interval = 0.1\n"));
  const fs::path a = scratch("cont");
  const RunSummary r = run_scenario(s, 1, a);
  CHECK(r.values.at("rho_a_mass_drift") < 1e-12);
  CHECK(r.values.at("rate_rho_s_min") >= 0.0);
  CHECK(fs::exists(a / "field_rho_s.bin"));
}

TEST_CASE("sweep: cartesian cells, aggregation, plots, failures") {
  CHECK_THROWS_AS(parse_axis("behavior.C"), ConfigError);
  CHECK_THROWS_AS(parse_axis("behavior.C="), ConfigError);
  const SweepAxis ax = parse_axis("behavior.C = 0, 1");
  CHECK(ax.values == std::vector<std::string>{"0", "1"});

  ConfigMap base = short_construction();
  base["sim.total_time"] = "10";
  const fs::path out = scratch("sweep");
  CHECK_THROWS_AS(run_sweep(base, {}, {1}, out, 1), ConfigError);

  const auto cells = run_sweep(base, {ax, parse_axis("world.n_agents = 2, oops")}, {1, 2}, out, 2);
  REQUIRE(cells.size() == 4);
  int failed = 0, ok = 0;
  for (const auto& c : cells) {
    failed += static_cast<int>(c.failures.size());
    ok += static_cast<int>(c.runs.size());
  }
  CHECK(failed == 4);  // every "oops" run, the sweep carried on
  CHECK(ok == 4);
  CHECK(fs::exists(out / "aggregate.csv"));
  CHECK(fs::exists(out / "plots" / "n_c.svg"));
  CHECK(slurp(out / "failures.txt").find("world.n_agents") != std::string::npos);

  // thread count does not change the aggregate
  const fs::path out1 = scratch("sweep_serial");
  run_sweep(base, {ax, parse_axis("world.n_agents = 2, oops")}, {1, 2}, out1, 1);
  CHECK(slurp(out / "aggregate.csv") == slurp(out1 / "aggregate.csv"));
}

TEST_CASE("svg plot") {
  const fs::path f = scratch("plot") / "p.svg";
  fs::create_directories(f.parent_path());
  write_svg_plot(f, "t", "x", "y", {{"a", {0, 1, 2}, {1, 3, 2}}, {"b", {0, 2}, {NAN, 1}}});
  const std::string s = slurp(f);
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("polyline") != std::string::npos);
  CHECK(s.find("</svg>") != std::string::npos);
}
