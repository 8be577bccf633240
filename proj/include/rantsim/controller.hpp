#pragma once

#include <string>

#include "rantsim/agent.hpp"
#include "rantsim/core.hpp"

namespace rantsim {

/// Firmware parameters of one RAnt.
struct BehaviorParams {
  double C = 1.0;         // cooperation, [0, 1]
  double K = 1.0;         // deposition rate, [−1, 1]
  double c_bar = 2.5;     // threshold centre
  double delta_c = 0.5;   // threshold half-width
  double c_max = 5.0;     // max detectable intensity
  double alpha = 50.0;    // tanh gain
  double b = 0.3;         // random-walk amplitude
  double l_s = 0.01;      // m
  /// false: fetch on every detection and release with c̄ = Δc = 0.
  bool thresholds_enabled = true;
  /// true: drop the C factor from both threshold inequalities.
  bool c_independent_threshold = false;

  double c_high() const { return c_bar + delta_c; }
  double c_low() const { return c_bar - delta_c; }
  void validate() const;
};

enum class Action { none, fetch, avoid, release, reset_forward };
const char* to_string(Action a);

struct ControlOutput {
  double omega = 0.0;  // commanded turning rate Ω (rad/s)
  Action action = Action::none;
  int d = +1;                 // direction after this tick
  double rotation = 0.0;      // in-place rotation for avoid/release (rad)
};

/// Ω = (C/l_s)·tanh(α d K (c_L − c_R)/c_max) + ((1 − C)/l_s)·b·sin(πW).
double turning_law(double c_left, double c_right, double W, const BehaviorParams& p, int d);

struct WheelSpeeds {
  double left = 0.0;
  double right = 0.0;
};

/// ω_{L,R} = d(v₀ ∓ gain·(l_w/2)·Ω).
WheelSpeeds wheel_speeds(double omega, int d, const KinematicParams& k, double gain);

struct BodyRates {
  double v = 0.0;      // signed forward speed
  double omega = 0.0;  // heading rate
};

/// Differential-drive reconstruction: v = (ω_L + ω_R)/2, θ̇ = (ω_R − ω_L)/l_w.
BodyRates body_rates(const WheelSpeeds& w, const KinematicParams& k);

/// K·C·c > K(c̄ + KΔc) (or the C-independent / threshold-free variants).
bool fetch_condition(double c, const BehaviorParams& p);
/// K·c < C·K(c̄ − KΔc) (or the C-independent / threshold-free variants).
bool release_condition(double c, const BehaviorParams& p);

struct BehaviorInputs {
  double c_left = 0.0;
  double c_right = 0.0;
  double c_here = 0.0;
  bool obstacle = false;
};

/// Per-agent controller memory: the accumulated Wiener process W.
struct BehaviorMemory {
  double W = 0.0;
};

/// One pass through the firmware main loop: heading update, then the
/// obstacle, detach and release branches. Exactly one action is reported;
/// a fetch ends the tick. When |K| < 1 a fetch or release attempt succeeds
/// with probability |K|; a failed fetch becomes an avoid.
ControlOutput behavior_tick(const BehaviorInputs& in, const AgentState& s, const BehaviorParams& p,
                            BehaviorMemory& mem, RngStream& rng, double dt);

}  // namespace rantsim
