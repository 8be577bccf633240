#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rantsim/harness.hpp"

using namespace rantsim;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  int replicas = 0;
  std::string out = "out";
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario, "scenario file (key = value)");
  cmd->add_option("--seed", c.seed, "first seed; consecutive seeds for replicas");
  cmd->add_option("--replicas", c.replicas, "number of seeds to run");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--set", c.sets, "override key=value (repeatable)");
}

ConfigMap load(const Common& c) {
  ConfigMap cfg;
  if (!c.scenario.empty()) cfg = load_config(c.scenario);
  for (const auto& s : c.sets) apply_override(cfg, s);
  return cfg;
}

std::vector<std::uint64_t> seeds_for(const Common& c, const Scenario& s) {
  const int n = c.replicas > 0 ? c.replicas : s.replicas;
  std::vector<std::uint64_t> out;
  if (c.seed) {
    for (int i = 0; i < n; ++i) out.push_back(*c.seed + static_cast<std::uint64_t>(i));
    return out;
  }
  out = s.seeds;
  while (static_cast<int>(out.size()) < n) out.push_back(out.back() + 1);
  return out;
}

void print_summary(const RunSummary& r, const fs::path& dir) {
  std::cout << r.scenario << " seed " << r.seed << " -> " << dir.string() << "\n";
  for (const auto& [k, v] : r.values) std::cout << "  " << k << " = " << v << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rantsim: photormone-guided swarm construction simulator"};
  app.require_subcommand(1);

  Common run_opts;
  auto* run = app.add_subcommand("run", "run a scenario for one or more seeds");
  add_common(run, run_opts);

  Common sweep_opts;
  std::vector<std::string> grid;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* sweep = app.add_subcommand("sweep", "cartesian parameter sweep with aggregation");
  add_common(sweep, sweep_opts);
  sweep->add_option("--grid", grid, "axis key=v1,v2,... (repeatable)")->required();
  sweep->add_option("--threads", threads, "worker threads");

  double L_w = 0, L_minus = 0, k_hat = 1.0, w = 0, l_s = 0.01, v_o = 0.04, k_plus = 1.5,
         k_minus = 1.5;
  std::optional<double> G;
  auto* predict = app.add_subcommand("predict-trap", "critical gain and trapping radius");
  predict->add_option("--L_w", L_w, "production width / sensor spacing");
  predict->add_option("--L_minus", L_minus, "decay length / sensor spacing");
  predict->add_option("--k_hat", k_hat, "k_plus / k_minus");
  predict->add_option("--w", w, "production diameter (m), with the dimensional options");
  predict->add_option("--l_s", l_s, "sensor spacing (m)");
  predict->add_option("--v_o", v_o, "speed (m/s)");
  predict->add_option("--k_plus", k_plus, "production rate (1/s)");
  predict->add_option("--k_minus", k_minus, "decay rate (1/s)");
  predict->add_option("--G", G, "nondimensional gain for the implicit radius");

  Common cont_opts;
  std::string preset = "construction";
  double h = 0.1, t_end = 2.0;
  auto* cont = app.add_subcommand("continuum", "run a continuum preset");
  add_common(cont, cont_opts);
  cont->add_option("--preset", preset, "construction|deconstruction");
  cont->add_option("--mesh", h, "mesh spacing (h)");
  cont->add_option("--t_end", t_end, "end time (nondimensional)");

  std::string run_dir, metrics_out;
  auto* metrics = app.add_subcommand("metrics", "recompute metrics from run snapshots");
  metrics->add_option("--run", run_dir, "run directory")->required();
  metrics->add_option("--out", metrics_out, "output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run || *cont) {
      Common& c = *run ? run_opts : cont_opts;
      ConfigMap cfg = load(c);
      if (*cont) {
        cfg["scenario.mode"] = "continuum";
        cfg.try_emplace("continuum.preset", preset);
        cfg.try_emplace("continuum.h", std::to_string(h));
        cfg.try_emplace("continuum.t_end", std::to_string(t_end));
      }
      const Scenario s = scenario_from_config(cfg);
      const auto seeds = seeds_for(c, s);
      for (auto sd : seeds) {
        const fs::path dir = seeds.size() == 1 ? fs::path(c.out)
                                               : fs::path(c.out) / ("seed_" + std::to_string(sd));
        print_summary(run_scenario(s, sd, dir), dir);
      }
      return 0;
    }
    if (*sweep) {
      const ConfigMap cfg = load(sweep_opts);
      const Scenario s = scenario_from_config(cfg);
      std::vector<SweepAxis> axes;
      for (const auto& g : grid) axes.push_back(parse_axis(g));
      const auto cells = run_sweep(cfg, axes, seeds_for(sweep_opts, s), sweep_opts.out, threads);
      std::size_t failed = 0;
      for (const auto& c : cells) failed += c.failures.size();
      std::cout << cells.size() << " cells -> " << sweep_opts.out << "/aggregate.csv";
      if (failed) std::cout << " (" << failed << " failed runs, see failures.txt)";
      std::cout << "\n";
      return 0;
    }
    if (*predict) {
      TrapRegime reg = w > 0.0 ? TrapRegime::from_dimensional(w, l_s, v_o, k_plus, k_minus)
                               : TrapRegime{L_w, L_minus, k_hat};
      reg.validate();
      nlohmann::ordered_json j;
      j["L_w"] = reg.L_w;
      j["L_minus"] = reg.L_minus;
      j["k_hat"] = reg.k_hat;
      j["regime"] = to_string(classify(reg));
      j["r_star_geometric"] = trapping_radius_geometric(reg);
      try {
        const auto p = critical_gain(reg);
        j["G_c"] = p.G_c;
        j["formula"] = p.formula;
        j["G_c_dimensional"] = p.G_c * (w > 0.0 ? v_o : 1.0);
      } catch (const ConfigError& e) {
        j["G_c"] = nullptr;
        j["note"] = e.what();
      }
      if (G) {
        const auto r = implicit_radius_large_decay(reg, *G);
        j["r_star_implicit"] = r ? nlohmann::ordered_json(*r) : nlohmann::ordered_json(nullptr);
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*metrics) {
      if (metrics_out.empty()) {
        recompute_metrics(run_dir, std::cout);
      } else {
        std::ofstream os(metrics_out, std::ios::binary);
        recompute_metrics(run_dir, os);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
