#include "rantsim/agent.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace rantsim {

void KinematicParams::validate() const {
  if (!(v_o > 0.0)) throw ConfigError("kinematics.v_o: must be > 0");
  if (!(l_s > 0.0)) throw ConfigError("kinematics.l_s: must be > 0");
  if (!(l_w > 0.0)) throw ConfigError("kinematics.l_w: must be > 0");
  if (!std::isfinite(G)) throw ConfigError("kinematics.G: must be finite");
}

AgentState step_kinematics(AgentState s, double omega, const KinematicParams& k, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt: must be > 0");
  const double mid = s.theta + 0.5 * omega * dt;
  s.r += heading_vec(mid) * (static_cast<double>(s.d) * k.v_o * dt);
  s.theta = wrap_angle(s.theta + omega * dt);
  return s;
}

AgentState step_kinematics(AgentState s, double omega, const KinematicParams& k, double dt,
                           const SimConfig& cfg) {
  s = step_kinematics(s, omega, k, dt);
  s.r = wrap_or_clamp(s.r, cfg);
  return s;
}

double gradient_turn_rate(double c_left, double c_right, const KinematicParams& k) {
  return k.G * (c_left - c_right) / k.l_s;
}

PhaseRate nondim_flow(double psi, double r, double G_nd) {
  if (!(r > 0.0)) throw ConfigError("r: must be > 0 (flow is singular at the origin)");
  return {(G_nd - 1.0 / r) * std::sin(psi), std::cos(psi)};
}

std::vector<PhasePoint> integrate_phase(double psi0, double r0, double G_nd, double dt,
                                        double t_end, int stride) {
  if (!(dt > 0.0)) throw ConfigError("dt: must be > 0");
  if (stride < 1) stride = 1;
  std::vector<PhasePoint> out;
  const long n = static_cast<long>(std::llround(t_end / dt));
  out.reserve(static_cast<std::size_t>(n / stride + 2));
  double psi = psi0, r = r0;
  out.push_back({0.0, psi, r});
  for (long i = 1; i <= n; ++i) {
    const PhaseRate k1 = nondim_flow(psi, r, G_nd);
    const PhaseRate k2 = nondim_flow(psi + 0.5 * dt * k1.dpsi, r + 0.5 * dt * k1.dr, G_nd);
    const PhaseRate k3 = nondim_flow(psi + 0.5 * dt * k2.dpsi, r + 0.5 * dt * k2.dr, G_nd);
    const PhaseRate k4 = nondim_flow(psi + dt * k3.dpsi, r + dt * k3.dr, G_nd);
    psi += dt / 6.0 * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi);
    r += dt / 6.0 * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr);
    if (i % stride == 0) out.push_back({static_cast<double>(i) * dt, psi, r});
  }
  return out;
}

double psi_linearized(double t, double a, double b, double G_nd) {
  if (!(G_nd > 0.0)) throw ConfigError("G: must be > 0");
  const double s2 = std::sqrt(2.0);
  const double arg = s2 * G_nd * t;
  return std::exp(-G_nd * t) / (2.0 * G_nd) *
         (s2 * (b + a * G_nd) * std::sinh(arg) + 2.0 * a * G_nd * std::cosh(arg));
}

double psi_leading_order(double t, double a, double b, double G_nd) {
  return a * a * std::exp(G_nd * t) / (a - b * t + a * G_nd * t);
}

double psi_lindstedt(double t, double alpha, double beta, double G_nd) {
  if (std::abs(2.0 * alpha) > 0.3) throw ConfigError("alpha: |2 alpha| must be <= 0.3");
  if (!(G_nd > 0.0)) throw ConfigError("G: must be > 0");
  return 2.0 * alpha * std::cos(beta + lindstedt_frequency(alpha, G_nd) * t);
}

double lindstedt_frequency(double alpha, double G_nd) {
  return G_nd - alpha * alpha / (G_nd * G_nd);
}

LindstedtConstants lindstedt_from_initial(double psi_tilde0, double dpsi_tilde0, double G_nd) {
  if (!(G_nd > 0.0)) throw ConfigError("G: must be > 0");
  // ψ̃ = A cos(ωt + β): A cos β = ψ̃0, −Aω sin β = ψ̃′0, with ω depending on A
  double omega = G_nd;
  LindstedtConstants c;
  for (int it = 0; it < 50; ++it) {
    const double amp = std::hypot(psi_tilde0, dpsi_tilde0 / omega);
    c.alpha = 0.5 * amp;
    c.beta = std::atan2(-dpsi_tilde0 / omega, psi_tilde0);
    const double next = lindstedt_frequency(c.alpha, G_nd);
    if (std::abs(next - omega) <= 1e-15 * std::abs(omega)) break;
    omega = next;
  }
  return c;
}

ConstantGradientRun simulate_constant_gradient(double lambda, const KinematicParams& k,
                                               AgentState s, double dt, double t_end,
                                               int stride) {
  k.validate();
  if (!(lambda > 0.0)) throw ConfigError("lambda: must be > 0");
  if (stride < 1) stride = 1;
  ConstantGradientRun run;
  const long n = static_cast<long>(std::llround(t_end / dt));
  auto record = [&](double t) {
    run.t.push_back(t);
    run.pos.push_back(s.r);
    run.theta.push_back(s.theta);
  };
  record(0.0);
  for (long i = 1; i <= n; ++i) {
    const double rn = s.r.norm();
    // ∇c = −λ r̂; undefined at the centre, where the agent sees no gradient
    const Vec2 grad = rn > 0.0 ? s.r * (-lambda / rn) : Vec2{};
    const double omega = k.G * grad.dot(left_normal(s.theta));
    s = step_kinematics(s, omega, k, dt);
    if (i % stride == 0) record(static_cast<double>(i) * dt);
  }
  return run;
}

double mean_orbit_radius(const ConstantGradientRun& run, double t_from) {
  double sum = 0.0;
  long n = 0;
  for (std::size_t i = 0; i < run.t.size(); ++i) {
    if (run.t[i] < t_from) continue;
    sum += run.pos[i].norm();
    ++n;
  }
  if (n == 0) throw ConfigError("t_from: no samples in window");
  return sum / static_cast<double>(n);
}

void write_trajectory_csv(std::ostream& os, std::span<const TrajectoryRow> rows, bool header) {
  if (header) os << "t,id,x,y,theta,d,carrying\n";
  char buf[160];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%.6f,%d,%.9g,%.9g,%.9g,%d,%d\n", row.t, row.s.id, row.s.r.x,
                  row.s.r.y, row.s.theta, row.s.d, row.s.carrying ? 1 : 0);
    os << buf;
  }
}

}  // namespace rantsim
