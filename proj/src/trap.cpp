#include "rantsim/trap.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace rantsim {

TrapRegime TrapRegime::from_dimensional(double w, double l_s, double v_o, double k_plus,
                                        double k_minus) {
  if (!(l_s > 0.0)) throw ConfigError("l_s: must be > 0");
  if (!(k_minus > 0.0)) throw ConfigError("k_minus: must be > 0");
  TrapRegime r{w / l_s, v_o / k_minus / l_s, k_plus / k_minus};
  r.validate();
  return r;
}

void TrapRegime::validate() const {
  if (!(L_w > 0.0)) throw ConfigError("L_w: must be > 0");
  if (!(L_minus > 0.0)) throw ConfigError("L_minus: must be > 0");
  if (!(k_hat > 0.0)) throw ConfigError("k_hat: must be > 0");
}

const char* to_string(DecayRegime r) {
  switch (r) {
    case DecayRegime::small_decay_length: return "small_decay_length";
    case DecayRegime::intermediate: return "intermediate";
    case DecayRegime::large_decay_length: return "large_decay_length";
  }
  return "?";
}

DecayRegime classify(const TrapRegime& reg) {
  if (reg.L_minus <= reg.L_w) return DecayRegime::small_decay_length;
  if (reg.L_minus >= 10.0 * reg.L_w) return DecayRegime::large_decay_length;
  return DecayRegime::intermediate;
}

double trapping_radius_geometric(const TrapRegime& reg) {
  reg.validate();
  return 0.25 * (reg.L_w + 1.0);
}

double outer_sensor_concentration(double r_star, const TrapRegime& reg) {
  reg.validate();
  if (!(r_star > 0.0)) throw ConfigError("r_star: must be > 0");
  const double ratio = (5.0 - reg.L_w) / (3.0 + reg.L_w);
  if (std::abs(ratio) > 1.0) throw ConfigError("L_w: intersection outside the outer circle");
  const double total = 2.0 * kPi * r_star / reg.L_minus;
  const double tau1 = 2.0 * r_star * std::acos(ratio) / reg.L_minus;
  const double tau2 = total - tau1;
  // (e^{τ₂} − 1)/(e^{τ₁+τ₂} − 1) via expm1 for small exposures
  const double frac = std::expm1(tau2) / std::expm1(total);
  return reg.k_hat * (1.0 - std::exp(0.5 * tau1) * frac);
}

double critical_gain_small_eps(const TrapRegime& reg) {
  reg.validate();
  const double eps = reg.L_w - 1.0;
  if (eps < 0.0) throw ConfigError("L_w: small-eps form needs L_w >= 1");
  const double x = kPi * reg.L_w / (2.0 * reg.L_minus);
  return 2.0 / reg.k_hat + reg.L_w * std::sqrt(eps) / (reg.L_minus * reg.k_hat) / std::tanh(x);
}

double critical_gain_large_width(const TrapRegime& reg) {
  reg.validate();
  return 4.0 * reg.L_minus / (reg.L_w * reg.k_hat) * std::sinh(kPi * reg.L_w / (4.0 * reg.L_minus));
}

std::optional<double> critical_gain_general(const TrapRegime& reg) {
  const double r_star = trapping_radius_geometric(reg);
  const double gap = reg.k_hat - outer_sensor_concentration(r_star, reg);
  if (!(gap > 0.0)) return std::nullopt;
  return 1.0 / (r_star * gap);
}

TrapPrediction critical_gain(const TrapRegime& reg) {
  reg.validate();
  TrapPrediction out;
  out.regime = classify(reg);
  out.r_star = trapping_radius_geometric(reg);
  if (out.regime == DecayRegime::intermediate) {
    const auto g = critical_gain_general(reg);
    if (!g) throw ConfigError("untrappable: k_hat <= c(R)");
    out.G_c = *g;
    out.formula = "general";
    return out;
  }
  if (reg.L_w <= 2.0) {
    out.G_c = critical_gain_small_eps(reg);
    out.formula = "small_eps";
  } else {
    out.G_c = critical_gain_large_width(reg);
    out.formula = "large_width";
  }
  if (!(std::isfinite(out.G_c) && out.G_c > 0.0)) throw ConfigError("untrappable: no finite gain");
  return out;
}

double steady_profile_css(double r, const TrapRegime& reg) {
  reg.validate();
  if (!(r > 0.0)) throw ConfigError("r: must be > 0");
  const double x = kPi * r / reg.L_minus;
  // coth(x) − 1 = 2/(e^{2x} − 1)
  const double tail = 2.0 / std::expm1(2.0 * x);
  return 0.5 * reg.k_hat * std::expm1(reg.L_w / reg.L_minus) * tail;
}

double implicit_radius_rhs(double r, const TrapRegime& reg, double G_nd) {
  const double s = std::sinh(kPi * r / reg.L_minus);
  return 2.0 * reg.L_minus / (kPi * G_nd * reg.k_hat) * s * s / std::expm1(reg.L_w / reg.L_minus);
}

double implicit_radius_linear_limit(const TrapRegime& reg, double G_nd) {
  return reg.L_w * G_nd * reg.k_hat / (2.0 * kPi);
}

std::optional<double> implicit_radius_large_decay(const TrapRegime& reg, double G_nd,
                                                  double r_min) {
  reg.validate();
  if (!(G_nd > 0.0)) return std::nullopt;
  // f(r) = rhs(r) − r is negative just above 0 and eventually positive, with a
  // single sign change; the root must clear the sensor half-separation.
  auto f = [&](double r) { return implicit_radius_rhs(r, reg, G_nd) - r; };
  double lo = r_min;
  if (f(lo) >= 0.0) return std::nullopt;
  double hi = 2.0 * lo;
  while (f(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e12) return std::nullopt;
  }
  while (hi - lo > 1e-8 * hi) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  const double root = 0.5 * (lo + hi);
  if (reg.L_minus / root > 100.0) return implicit_radius_linear_limit(reg, G_nd);
  return root;
}

// ---------------------------------------------------------------------------

std::optional<CircleFit> fit_circle(std::span<const Vec2> pts) {
  if (pts.size() < 3) return std::nullopt;
  Vec2 mean;
  for (const auto& p : pts) mean += p;
  mean *= 1.0 / static_cast<double>(pts.size());
  // x² + y² + D x + E y + F = 0 in centred coordinates
  Eigen::MatrixXd A(pts.size(), 3);
  Eigen::VectorXd b(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 q = pts[i] - mean;
    A(i, 0) = q.x;
    A(i, 1) = q.y;
    A(i, 2) = 1.0;
    b(i) = -q.norm2();
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < 3) return std::nullopt;
  const Eigen::Vector3d sol = qr.solve(b);
  const Vec2 c{-0.5 * sol(0), -0.5 * sol(1)};
  const double r2 = c.norm2() - sol(2);
  if (!(r2 > 0.0)) return std::nullopt;
  return CircleFit{c + mean, std::sqrt(r2)};
}

TrapVerdict detect_trap(std::span<const double> t, std::span<const Vec2> pos, double window,
                        double radius_limit) {
  TrapVerdict v;
  if (t.size() != pos.size() || t.size() < 6) return v;
  const double t_end = t.back();
  if (t_end - t.front() < 2.0 * window) return v;
  v.determinate = true;

  const auto first_at = [&](double when) {
    return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), when) - t.begin());
  };
  const std::size_t a = first_at(t_end - 2.0 * window);
  const std::size_t m = first_at(t_end - window);
  const auto last = pos.subspan(m);
  const auto prev = pos.subspan(a, m - a);

  Vec2 centroid;
  for (const auto& p : last) centroid += p;
  centroid *= 1.0 / static_cast<double>(last.size());
  for (const auto& p : last) v.bounding_radius = std::max(v.bounding_radius, (p - centroid).norm());

  const auto fit = fit_circle(last);
  const auto fit_prev = fit_circle(prev);
  if (!fit || !fit_prev) return v;
  v.radius = fit->radius;
  v.center = fit->center;
  v.center_drift = (fit->center - fit_prev->center).norm();
  v.trapped = v.bounding_radius < radius_limit && v.center_drift < 0.25 * v.radius;
  return v;
}

// ---------------------------------------------------------------------------

void SwarmParams::validate() const {
  if (!(v_o > 0.0)) throw ConfigError("swarm.v_o: must be > 0");
  if (!(l_s > 0.0)) throw ConfigError("swarm.l_s: must be > 0");
  if (!(w > 0.0)) throw ConfigError("swarm.w: must be > 0");
  if (!(k_minus > 0.0)) throw ConfigError("swarm.k_minus: must be > 0");
  if (!(L > 0.0)) throw ConfigError("swarm.L: must be > 0");
  if (!(h > 0.0 && h < L)) throw ConfigError("swarm.h: must lie in (0, L)");
  if (!(dt > 0.0)) throw ConfigError("swarm.dt: must be > 0");
  if (!(dt * k_minus < 1.0)) throw ConfigError("swarm.dt: dt * k_minus must be < 1");
}

TrapRegime SwarmParams::regime() const {
  return TrapRegime::from_dimensional(w, l_s, v_o, k_plus, k_minus);
}

double SwarmParams::footprint_radius() const {
  return footprint == FootprintProfile::disk ? 0.5 * w : w;
}

namespace {

PhotormoneGrid make_swarm_grid(const SwarmParams& p) {
  const auto n = static_cast<std::size_t>(std::llround(p.L / p.h));
  PhotormoneGrid g(n, n, p.L / static_cast<double>(n));
  g.k_plus = p.k_plus;
  g.k_minus = p.k_minus;
  g.D_c = 0.0;
  g.w = p.footprint_radius();
  g.boundary = BoundaryMode::periodic;
  return g;
}

}  // namespace

PhototaxisSwarm::PhototaxisSwarm(const SwarmParams& p, std::vector<AgentState> agents)
    : p_(p), agents_(std::move(agents)) {
  p_.validate();
  grid_ = make_swarm_grid(p_);
  box_.width = box_.height = grid_.width();
  box_.boundary = BoundaryMode::periodic;
  if (p_.initial_slope != 0.0) {
    for (std::size_t j = 0; j < grid_.ny(); ++j)
      for (std::size_t i = 0; i < grid_.nx(); ++i)
        grid_.at(i, j) = p_.initial_slope * (grid_.cell_center(i, j).x - 0.5 * p_.L);
  }
  for (auto& a : agents_) a.r = wrap_or_clamp(a.r, box_);
  unwrapped_.reserve(agents_.size());
  for (const auto& a : agents_) unwrapped_.push_back(a.r);
  tracks_.resize(agents_.size());
  sources_.resize(agents_.size());
}

void PhototaxisSwarm::step() {
  KinematicParams k;
  k.v_o = p_.v_o;
  k.G = p_.G;
  k.l_s = p_.l_s;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    auto& a = agents_[i];
    const SensorReading s = sensor_pair_read(grid_, a.r, a.theta, p_.l_s);
    const Vec2 before = a.r;
    a = step_kinematics(a, gradient_turn_rate(s.left, s.right, k), k, p_.dt, box_);
    unwrapped_[i] += periodic_delta(before, a.r, box_.width, box_.height);
    sources_[i] = {a.r, p_.footprint_radius(), p_.footprint, 1.0};
  }
  step_field(grid_, sources_, p_.dt);
  t_ += p_.dt;
  ++steps_;
  if (stride_ > 0 && steps_ % stride_ == 0) {
    sample_t_.push_back(t_);
    for (std::size_t i = 0; i < agents_.size(); ++i) tracks_[i].push_back(unwrapped_[i]);
  }
}

void PhototaxisSwarm::run(double duration) {
  const long n = std::lround(duration / p_.dt);
  for (long i = 0; i < n; ++i) step();
}

OrbitField forced_orbit_field(const SwarmParams& p, double radius, double duration,
                              double weight) {
  p.validate();
  if (!(radius > 0.0)) throw ConfigError("radius: must be > 0");
  OrbitField out{make_swarm_grid(p), 0.0};
  const Vec2 centre{0.5 * out.grid.width(), 0.5 * out.grid.height()};
  const double rate = p.v_o / radius;
  const long n = std::lround(duration / p.dt);
  SourceFootprint src{centre, p.footprint_radius(), p.footprint, weight};
  for (long i = 1; i <= n; ++i) {
    out.angle = rate * p.dt * static_cast<double>(i);
    src.center = centre + heading_vec(out.angle) * radius;
    step_field(out.grid, std::span<const SourceFootprint>(&src, 1), p.dt);
  }
  return out;
}

TrapTrial run_trap_trial(const SwarmParams& params, const TrapTrialSpec& spec) {
  if (spec.n_agents < 1) throw ConfigError("n_agents: must be >= 1");
  // keep the largest turn per step below 0.1 rad at high gain
  SwarmParams p = params;
  p.dt = std::min(p.dt, 0.1 * p.l_s / (p.G * p.regime().k_hat));
  RngStream rng(spec.seed);
  const Vec2 centre{0.5 * p.L, 0.5 * p.L};
  std::vector<AgentState> agents;
  double heading = rng.uniform(-kPi, kPi);
  Vec2 start = centre;
  OrbitField primed;
  if (spec.prime_radius > 0.0) {
    primed = forced_orbit_field(p, spec.prime_radius, spec.prime_time,
                                static_cast<double>(spec.n_agents));
    start = centre + heading_vec(primed.angle) * spec.prime_radius;
    heading = primed.angle + 0.5 * kPi;
  }
  for (int i = 0; i < spec.n_agents; ++i) {
    AgentState a;
    a.id = i;
    const double rr = spec.jitter * p.l_s * std::sqrt(rng.uniform());
    const double phi = rng.uniform(-kPi, kPi);
    a.r = start + heading_vec(phi) * rr;
    a.theta = wrap_angle(heading + rng.uniform(-spec.heading_jitter, spec.heading_jitter));
    agents.push_back(a);
  }
  PhototaxisSwarm swarm(p, std::move(agents));
  if (spec.prime_radius > 0.0) {
    auto dst = swarm.field().values();
    auto src = primed.grid.values();
    std::copy(src.begin(), src.end(), dst.begin());
  }
  swarm.record_every(std::max(1, static_cast<int>(std::lround(0.05 / p.dt))));
  swarm.run(spec.duration);

  double limit = spec.radius_limit;
  if (!(limit > 0.0)) {
    const TrapRegime reg = p.regime();
    limit = 4.0 * p.l_s * std::max(trapping_radius_geometric(reg), 1.0);
  }
  const auto& tr = swarm.track(0);
  const TrapVerdict v = detect_trap(swarm.sample_times(), tr, spec.window, limit);
  TrapTrial out;
  out.trapped = v.determinate && v.trapped;
  out.radius = out.trapped ? v.radius : 0.0;
  return out;
}

}  // namespace rantsim
