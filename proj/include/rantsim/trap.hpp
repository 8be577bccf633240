#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rantsim/agent.hpp"
#include "rantsim/core.hpp"
#include "rantsim/photormone.hpp"

namespace rantsim {

/// Nondimensional trapping groups. Lengths are in units of the sensor
/// separation l_s: L_w = w/l_s with w the production diameter, and
/// L_minus = (v_o/k₋)/l_s. k_hat = k₊/k₋.
struct TrapRegime {
  double L_w = 1.0;
  double L_minus = 1.0;
  double k_hat = 1.0;

  static TrapRegime from_dimensional(double w, double l_s, double v_o, double k_plus,
                                     double k_minus);
  void validate() const;
};

enum class DecayRegime { small_decay_length, intermediate, large_decay_length };
const char* to_string(DecayRegime r);

/// small when L_minus ≤ L_w, large when L_minus ≥ 10·L_w.
DecayRegime classify(const TrapRegime& reg);

struct TrapPrediction {
  double r_star = 0.0;   // nondimensional (units of l_s)
  double G_c = 0.0;      // nondimensional gain G/v_o (lengths in l_s)
  DecayRegime regime = DecayRegime::small_decay_length;
  std::string formula;   // which closed form produced G_c
};

/// r* = (L_w + 1)/4, the short-decay-length limit.
double trapping_radius_geometric(const TrapRegime& reg);

/// Photormone seen by the outer sensor of an agent on the circle of radius
/// r_star:
///   c(R) = k̂[1 − e^{τ₁/2}(e^{τ₂} − 1)/(e^{τ₁+τ₂} − 1)],
///   τ₁ + τ₂ = 2π r*/L₋,  τ₁ = 2 r* arccos(x/R)/L₋,  x/R = (5 − L_w)/(3 + L_w).
/// Throws when |x/R| > 1.
double outer_sensor_concentration(double r_star, const TrapRegime& reg);

/// 𝖦_c = 2/k̂ + (L_w√ε/(L₋k̂))·coth(πL_w/(2L₋)), ε = L_w − 1 ≥ 0.
double critical_gain_small_eps(const TrapRegime& reg);
/// 𝖦_c = (4L₋/(L_w k̂))·sinh(πL_w/(4L₋)).
double critical_gain_large_width(const TrapRegime& reg);
/// 𝖦_c = 1/(r*(k̂ − c(R))) with r* = (L_w + 1)/4; nullopt when c(R) ≥ k̂.
std::optional<double> critical_gain_general(const TrapRegime& reg);

/// Critical gain with the closed form chosen by regime: the small- and
/// large-decay branches use the small-ε form for L_w ≤ 2 and the wide
/// footprint form above; the intermediate branch uses the general formula.
/// Throws ConfigError("untrappable") when no finite gain exists.
TrapPrediction critical_gain(const TrapRegime& reg);

/// c_ss(r) = (k̂/2)(e^{L_w/L₋} − 1)[coth(πr/L₋) − 1].
double steady_profile_css(double r, const TrapRegime& reg);

/// Right-hand side of the implicit radius equation,
/// (2L₋/(π𝖦k̂))·sinh²(πr/L₋)/(e^{L_w/L₋} − 1).
double implicit_radius_rhs(double r, const TrapRegime& reg, double G_nd);

/// Linear limit r* ≈ L_w 𝖦 k̂ / (2π).
double implicit_radius_linear_limit(const TrapRegime& reg, double G_nd);

/// Smallest root of r = implicit_radius_rhs(r) with r ≥ r_min (default ½,
/// the sensor half-separation) by bisection to 1e-8 relative. Returns the
/// linear limit when L₋/r* > 100. nullopt when no root ≥ r_min exists.
std::optional<double> implicit_radius_large_decay(const TrapRegime& reg, double G_nd,
                                                  double r_min = 0.5);

// ---------------------------------------------------------------------------
// Trap detection on a trajectory.

struct CircleFit {
  Vec2 center;
  double radius = 0.0;
};

/// Algebraic least-squares circle fit (Kåsa). Needs ≥ 3 non-collinear points.
std::optional<CircleFit> fit_circle(std::span<const Vec2> pts);

struct TrapVerdict {
  bool determinate = false;
  bool trapped = false;
  double radius = 0.0;       // fitted orbit radius over the trailing window
  Vec2 center;               // fitted orbit centre
  double bounding_radius = 0.0;
  double center_drift = 0.0; // fitted-centre displacement between the last two windows
};

/// Trapped iff, over the trailing window, every position lies within
/// `radius_limit` of the window centroid and the fitted orbit centre moved
/// less than 25% of the fitted radius relative to the preceding window.
/// Positions must be unwrapped. Indeterminate if the samples span < 2 windows.
TrapVerdict detect_trap(std::span<const double> t, std::span<const Vec2> pos, double window,
                        double radius_limit);

// ---------------------------------------------------------------------------
// Pure-phototaxis swarm: agents with Ω = G(c_L − c_R)/l_s in a field they
// produce, on a periodic square domain.

struct SwarmParams {
  double v_o = 0.04;
  double G = 0.3;
  double l_s = 0.01;
  double w = 0.03;  // production diameter (disk) or Gaussian width
  FootprintProfile footprint = FootprintProfile::disk;
  double k_plus = 1.5;
  double k_minus = 1.5;
  double L = 0.2;  // domain side
  double h = 0.0025;
  double dt = 0.005;
  /// Initial field c = slope·(x − L/2) decaying with the field; breaks the
  /// left/right symmetry so agents start turning.
  double initial_slope = 0.0;

  void validate() const;
  TrapRegime regime() const;
  double footprint_radius() const;
};

class PhototaxisSwarm {
 public:
  PhototaxisSwarm(const SwarmParams& p, std::vector<AgentState> agents);

  void step();
  void run(double duration);

  double t() const { return t_; }
  const SwarmParams& params() const { return p_; }
  const PhotormoneGrid& field() const { return grid_; }
  PhotormoneGrid& field() { return grid_; }
  const std::vector<AgentState>& agents() const { return agents_; }
  /// Unwrapped positions, one per agent.
  const std::vector<Vec2>& unwrapped() const { return unwrapped_; }

  /// Records unwrapped positions every `stride` steps from now on.
  void record_every(int stride) { stride_ = stride; }
  const std::vector<double>& sample_times() const { return sample_t_; }
  /// Recorded unwrapped track of agent i.
  const std::vector<Vec2>& track(std::size_t i) const { return tracks_[i]; }

 private:
  SwarmParams p_;
  PhotormoneGrid grid_;
  SimConfig box_;
  std::vector<AgentState> agents_;
  std::vector<Vec2> unwrapped_;
  std::vector<SourceFootprint> sources_;
  double t_ = 0.0;
  long steps_ = 0;
  int stride_ = 0;
  std::vector<double> sample_t_;
  std::vector<std::vector<Vec2>> tracks_;
};

struct OrbitField {
  PhotormoneGrid grid;
  double angle = 0.0;  // polar angle of the source at the end (rad)
};

/// Scripted-orbit field: a source of the swarm footprint (times `weight`)
/// moved counter-clockwise on a circle of `radius` (m) about the domain
/// centre at speed v_o for `duration`. Starts from an empty field.
OrbitField forced_orbit_field(const SwarmParams& p, double radius, double duration,
                              double weight = 1.0);

struct TrapTrial {
  bool trapped = false;
  double radius = 0.0;  // fitted orbit radius (m); 0 when not trapped
};

struct TrapTrialSpec {
  int n_agents = 1;
  /// Co-located start: agents start within `jitter`·l_s of the centre with
  /// headings within ±`heading_jitter` of a common heading.
  double jitter = 0.05;
  double heading_jitter = 0.05;
  double duration = 60.0;  // s
  double window = 10.0;    // s, trap-detector window
  double radius_limit = 0.0;  // m; 0 → 4·l_s·max(r*_geometric, 1)
  /// > 0: before release the field is built by all agents circling together
  /// at this radius (m) for `prime_time`, and agents start on that orbit.
  double prime_radius = 0.0;
  double prime_time = 5.0;
  std::uint64_t seed = 1;
};

/// Runs one co-located group and classifies agent 0's trajectory. dt is
/// reduced so that G·k̂·dt/l_s ≤ 0.1.
TrapTrial run_trap_trial(const SwarmParams& p, const TrapTrialSpec& spec);

}  // namespace rantsim
