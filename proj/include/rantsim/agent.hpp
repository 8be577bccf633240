#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "rantsim/core.hpp"

namespace rantsim {

struct AgentState {
  Vec2 r;
  double theta = 0.0;  // (−π, π]
  int d = +1;          // +1 forward, −1 reverse
  bool carrying = false;
  int id = 0;
};

struct KinematicParams {
  double v_o = 0.04;  // m/s
  double G = 1e-2;    // turn rate per unit lateral intensity gradient
  double l_s = 0.01;  // sensor separation (m)
  double l_w = 0.03;  // wheel base (m)

  void validate() const;
};

/// Advances heading by ω·dt and position by d·v_o·p̂(θ + ω·dt/2)·dt.
AgentState step_kinematics(AgentState s, double omega, const KinematicParams& k, double dt);
/// As above, then wraps the position per cfg.
AgentState step_kinematics(AgentState s, double omega, const KinematicParams& k, double dt,
                           const SimConfig& cfg);

/// G·(c_L − c_R)/l_s, the sensor-pair estimate of G(∇c·n̂).
double gradient_turn_rate(double c_left, double c_right, const KinematicParams& k);

// ---------------------------------------------------------------------------
// Constant-gradient dynamics in nondimensional variables: lengths in 1/λ,
// time in 1/(v_o λ), gain 𝖦 = G/v_o.

struct PhaseRate {
  double dpsi = 0.0;
  double dr = 0.0;
};

/// (ψ̇, ṙ) = ((𝖦 − 1/r) sin ψ, cos ψ). Throws for r ≤ 0.
PhaseRate nondim_flow(double psi, double r, double G_nd);

struct PhasePoint {
  double t = 0.0;
  double psi = 0.0;
  double r = 0.0;
};

/// Classical RK4 on the (ψ, r) system; records every `stride`-th step.
std::vector<PhasePoint> integrate_phase(double psi0, double r0, double G_nd, double dt, double t_end,
                                        int stride = 1);

/// Solution of ψ̈ = 𝖦²ψ − 2𝖦ψ̇ with ψ(0) = a, ψ̇(0) = b.
double psi_linearized(double t, double a, double b, double G_nd);

/// Solution a² e^{𝖦t} / (a − bt + a𝖦t) of ψ̈ = 𝖦²ψ − 2𝖦ψ̇ + 2ψ̇²/ψ with
/// ψ(0) = a, ψ̇(0) = b.
double psi_leading_order(double t, double a, double b, double G_nd);

/// ψ̃(t) = 2α cos(β − α²t/𝖦² + 𝖦t), the perturbative oscillation about
/// ψ = π/2. Requires |2α| ≤ 0.3.
double psi_lindstedt(double t, double alpha, double beta, double G_nd);

/// Angular frequency 𝖦 − α²/𝖦² of psi_lindstedt.
double lindstedt_frequency(double alpha, double G_nd);

struct LindstedtConstants {
  double alpha = 0.0;
  double beta = 0.0;
};

/// (α, β) matching ψ̃(0) and ψ̃′(0).
LindstedtConstants lindstedt_from_initial(double psi_tilde0, double dpsi_tilde0, double G_nd);

// ---------------------------------------------------------------------------
// Dimensional constant-gradient experiment: c = −λ|r − centre|, so
// ∇c = −λ r̂ and Ω = G(∇c·n̂) is evaluated analytically.

struct ConstantGradientRun {
  std::vector<double> t;
  std::vector<Vec2> pos;  // relative to the gradient centre
  std::vector<double> theta;
};

ConstantGradientRun simulate_constant_gradient(double lambda, const KinematicParams& k,
                                               AgentState init, double dt, double t_end,
                                               int stride = 1);

/// Mean distance from the gradient centre over samples with t ≥ t_from.
double mean_orbit_radius(const ConstantGradientRun& run, double t_from);

// ---------------------------------------------------------------------------

struct TrajectoryRow {
  double t = 0.0;
  AgentState s;
};

/// CSV with header t,id,x,y,theta,d,carrying.
void write_trajectory_csv(std::ostream& os, std::span<const TrajectoryRow> rows, bool header = true);

}  // namespace rantsim
