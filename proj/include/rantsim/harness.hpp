#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rantsim/agent.hpp"
#include "rantsim/continuum.hpp"
#include "rantsim/trap.hpp"
#include "rantsim/world.hpp"

namespace rantsim {

/// Flat dotted-key → raw value map.
using ConfigMap = std::map<std::string, std::string>;

/// INI-style text: `key = value` lines, `[section]` headers prefix their
/// keys with `section.`, `#` and `;` start comments.
ConfigMap parse_config(std::istream& in);
ConfigMap load_config(const std::filesystem::path& file);
/// Parses "key=value" into the map (overwrites).
void apply_override(ConfigMap& cfg, const std::string& assignment);

enum class ScenarioMode {
  constant_gradient,
  single_trap,
  multi_trap_phase,
  construction,
  deconstruction,
  robustness_2x2,
  continuum
};
const char* to_string(ScenarioMode m);
ScenarioMode scenario_mode_from_string(const std::string& s);

struct ConstantGradientSettings {
  double lambda_ref = 50.0;  // 1/m
  std::vector<double> lambda_factors{0.5, 1.0, 2.0, 4.0};
  double t_end = 60.0;       // s
  double dt = 1e-3;          // s
  double settle = 0.5;       // fraction of t_end discarded before fitting
};

struct TrapSettings {
  TrapTrialSpec trial;
  /// colocated: run_trap_trial verdict. random: uniform placement, tracks
  /// mean pairwise distance.
  std::string placement = "colocated";
  double distance_every = 1.0;  // s, random placement sampling
};

struct PhaseSettings {
  std::vector<double> L_w{1.2, 1.6, 2.0, 3.0};
  /// Gains as multiples of the predicted single-agent critical gain.
  std::vector<double> gain_factors{0.5, 0.8, 1.25, 2.0};
  std::vector<int> n_agents{1};
  int seeds_per_cell = 3;
};

struct ContinuumSettings {
  std::string preset = "construction";
  double h = 0.1;
  double t_end = 2.0;
  double snapshot_interval = 0.5;
  double safety = 0.5;
  /// NaN leaves the preset value.
  double C = std::numeric_limits<double>::quiet_NaN();
  double K = std::numeric_limits<double>::quiet_NaN();
};

struct Scenario {
  std::string name = "unnamed";
  ScenarioMode mode = ScenarioMode::construction;
  int replicas = 1;
  std::vector<std::uint64_t> seeds{1};
  double snapshot_interval = 60.0;  // s, world modes
  int trace_every = 0;              // ticks between agent trace rows, 0 = off
  double cluster_delta = 0.025;     // m
  /// robustness_2x2: nonzero-threshold case parameters use `world.behavior`.
  WorldParams world;
  ConstantGradientSettings cg;
  SwarmParams swarm;
  TrapSettings trap;
  PhaseSettings phase;
  ContinuumSettings continuum;

  void validate() const;
};

/// Defaults for the mode, then every key applied. Unknown keys and
/// unparsable values throw ConfigError naming the key.
Scenario scenario_from_config(const ConfigMap& cfg);
/// Every recognised key with its current value, sorted.
ConfigMap scenario_to_config(const Scenario& s);
std::vector<std::string> known_keys();

struct RunSummary {
  std::string scenario;
  std::string mode;
  std::uint64_t seed = 0;
  std::map<std::string, double> values;
};

/// Runs (scenario, seed) into `out_dir` (created; replaced atomically) and
/// returns the summary also written to summary.json.
RunSummary run_scenario(const Scenario& s, std::uint64_t seed, const std::filesystem::path& out_dir);

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};
/// "key=v1,v2,..."
SweepAxis parse_axis(const std::string& spec);

struct SweepCell {
  std::map<std::string, std::string> point;
  std::vector<RunSummary> runs;
  std::vector<std::string> failures;  // one message per failed seed
};

/// Cartesian product of the axes × seeds, run on `threads` workers. Each run
/// lands in out_dir/cell_<i>/seed_<s>; aggregate.csv and one SVG per summary
/// value are written to out_dir. Throws ConfigError on an empty grid.
std::vector<SweepCell> run_sweep(const ConfigMap& base, const std::vector<SweepAxis>& axes,
                                 const std::vector<std::uint64_t>& seeds,
                                 const std::filesystem::path& out_dir, int threads);

/// Recomputes metrics.csv rows from the substrate snapshots of a world run.
void recompute_metrics(const std::filesystem::path& run_dir, std::ostream& out);

/// Minimal line chart: one polyline per series, shared axes.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
void write_svg_plot(const std::filesystem::path& file, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<SvgSeries>& series);

}  // namespace rantsim
