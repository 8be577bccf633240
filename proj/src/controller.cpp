#include "rantsim/controller.hpp"

#include <cmath>

namespace rantsim {

void BehaviorParams::validate() const {
  if (!(C >= 0.0 && C <= 1.0)) throw ConfigError("behavior.C: must lie in [0, 1]");
  if (!(std::abs(K) <= 1.0)) throw ConfigError("behavior.K: must lie in [-1, 1]");
  if (!(delta_c >= 0.0)) throw ConfigError("behavior.delta_c: must be >= 0");
  if (!(c_max > 0.0)) throw ConfigError("behavior.c_max: must be > 0");
  if (!(c_low() >= 0.0)) throw ConfigError("behavior.c_bar: c_bar - delta_c must be >= 0");
  if (!(l_s > 0.0)) throw ConfigError("behavior.l_s: must be > 0");
}

const char* to_string(Action a) {
  switch (a) {
    case Action::none: return "none";
    case Action::fetch: return "fetch";
    case Action::avoid: return "avoid";
    case Action::release: return "release";
    case Action::reset_forward: return "reset_forward";
  }
  return "?";
}

double turning_law(double c_left, double c_right, double W, const BehaviorParams& p, int d) {
  const double taxis = std::tanh(p.alpha * d * p.K * (c_left - c_right) / p.c_max);
  const double walk = p.b * std::sin(kPi * W);
  return (p.C * taxis + (1.0 - p.C) * walk) / p.l_s;
}

WheelSpeeds wheel_speeds(double omega, int d, const KinematicParams& k, double gain) {
  const double turn = gain * 0.5 * k.l_w * omega;
  return {d * (k.v_o - turn), d * (k.v_o + turn)};
}

BodyRates body_rates(const WheelSpeeds& w, const KinematicParams& k) {
  return {0.5 * (w.left + w.right), (w.right - w.left) / k.l_w};
}

bool fetch_condition(double c, const BehaviorParams& p) {
  if (!p.thresholds_enabled) return true;
  const double coop = p.c_independent_threshold ? 1.0 : p.C;
  return p.K * coop * c > p.K * (p.c_bar + p.K * p.delta_c);
}

bool release_condition(double c, const BehaviorParams& p) {
  const double coop = p.c_independent_threshold ? 1.0 : p.C;
  if (!p.thresholds_enabled) return p.K * c < 0.0;
  return p.K * c < coop * p.K * (p.c_bar - p.K * p.delta_c);
}

ControlOutput behavior_tick(const BehaviorInputs& in, const AgentState& s, const BehaviorParams& p,
                            BehaviorMemory& mem, RngStream& rng, double dt) {
  ControlOutput out;
  out.d = s.d;
  mem.W += wiener_increment(rng, dt);
  out.omega = turning_law(in.c_left, in.c_right, mem.W, p, s.d);

  const double success = std::abs(p.K);
  auto attempt = [&] { return success >= 1.0 || rng.bernoulli(success); };

  if (in.obstacle && out.d == +1) {
    if (fetch_condition(in.c_here, p) && attempt()) {
      out.action = Action::fetch;
      out.d = -1;
      return out;
    }
    out.action = Action::avoid;
    out.rotation = rng.uniform(-kPi, kPi);
    return out;
  }
  if (!in.obstacle) {
    if (out.d != +1 || s.carrying) out.action = Action::reset_forward;
    out.d = +1;
    return out;
  }
  if (out.d == -1 && release_condition(in.c_here, p) && attempt()) {
    out.action = Action::release;
    out.d = +1;
    out.rotation = rng.uniform(-kPi, kPi);
  }
  return out;
}

}  // namespace rantsim
