#include "doctest.h"
#include "rantsim/trap.hpp"

#include <cmath>
#include <vector>

using namespace rantsim;

TEST_CASE("geometric trapping radius") {
  CHECK(trapping_radius_geometric({1.0, 0.5, 1.0}) == 0.5);
  const auto reg = TrapRegime::from_dimensional(0.025, 0.01, 0.04, 0.1, 0.02);
  CHECK(reg.L_w == doctest::Approx(2.5));
  CHECK(trapping_radius_geometric(reg) == doctest::Approx(0.875));
  CHECK(trapping_radius_geometric({2.5, 0.3, 7.0}) == trapping_radius_geometric({2.5, 2.0, 0.1}));
}

TEST_CASE("regime classification") {
  CHECK(classify({2.0, 1.0, 1.0}) == DecayRegime::small_decay_length);
  CHECK(classify({2.0, 2.0, 1.0}) == DecayRegime::small_decay_length);
  CHECK(classify({2.0, 5.0, 1.0}) == DecayRegime::intermediate);
  CHECK(classify({2.0, 20.0, 1.0}) == DecayRegime::large_decay_length);
}

namespace {
// c at the outer sensor of a scripted orbit after many decay times; the
// outer sensor sits half a sensor separation outside the orbit.
double simulated_outer_sensor(double L_w, double L_minus) {
  SwarmParams p;
  p.l_s = 0.01;
  p.v_o = 0.04;
  p.w = L_w * p.l_s;
  p.k_minus = p.v_o / (L_minus * p.l_s);
  p.k_plus = p.k_minus;
  p.h = p.l_s / 40.0;
  const double r = 0.25 * (L_w + 1.0) * p.l_s;
  p.L = std::ceil(2.0 * (r + p.l_s * (L_w + 2.0)) / p.h) * p.h;
  p.dt = std::min(0.2 * p.h / p.v_o, 0.01 / p.k_minus);
  const auto orbit = forced_orbit_field(p, r, 12.0 / p.k_minus);
  const Vec2 c{0.5 * orbit.grid.width(), 0.5 * orbit.grid.height()};
  return sample_bilinear(orbit.grid, c + heading_vec(orbit.angle) * (r + 0.5 * p.l_s));
}
}  // namespace

TEST_CASE("outer sensor concentration") {
  CHECK(outer_sensor_concentration(0.5, {1.0, 3.0, 1.0}) == doctest::Approx(0.0));
  const TrapRegime reg{1.2, 4.0, 1.0};
  const double theory = outer_sensor_concentration(trapping_radius_geometric(reg), reg);
  CHECK(theory > 0.0);
  CHECK(theory < 1.0);
  CHECK(simulated_outer_sensor(1.2, 4.0) == doctest::Approx(theory).epsilon(0.02));
  for (double L_w : {1.1, 2.0, 3.5, 4.9})
    for (double L_minus : {0.2, 1.0, 30.0}) {
      const double v = outer_sensor_concentration(0.25 * (L_w + 1.0), {L_w, L_minus, 2.0});
      CHECK(v >= 0.0);
      CHECK(v <= 2.0);
    }
  CHECK_THROWS_AS(outer_sensor_concentration(1.0, {0.5, 1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(outer_sensor_concentration(0.0, {2.0, 1.0, 1.0}), ConfigError);
}

TEST_CASE("critical gain closed forms") {
  CHECK(critical_gain_small_eps({1.0, 0.5, 1.0}) == doctest::Approx(2.0));
  CHECK(critical_gain_small_eps({1.0, 0.5, 2.0}) == doctest::Approx(1.0));
  CHECK(critical_gain_large_width({3.0, 1e6, 1.0}) == doctest::Approx(kPi).epsilon(1e-9));
  const auto small = critical_gain({1.5, 0.5, 1.0});
  CHECK(small.regime == DecayRegime::small_decay_length);
  CHECK(small.formula == "small_eps");
  const auto wide = critical_gain({3.0, 0.5, 1.0});
  CHECK(wide.formula == "large_width");
  const auto mid = critical_gain({1.5, 5.0, 1.0});
  CHECK(mid.formula == "general");
  const TrapRegime reg{1.5, 5.0, 1.0};
  const double r = trapping_radius_geometric(reg);
  CHECK(mid.G_c == doctest::Approx(1.0 / (r * (1.0 - outer_sensor_concentration(r, reg)))));
}

TEST_CASE("general critical gain approaches the small-eps form") {
  // expanding the general formula in √ε at short decay length recovers the coth term
  for (double L_minus : {0.3, 1.0}) {
    const TrapRegime reg{1.0 + 1e-6, L_minus, 1.0};
    CHECK(*critical_gain_general(reg) == doctest::Approx(critical_gain_small_eps(reg)).epsilon(1e-3));
  }
}

TEST_CASE("steady profile") {
  const TrapRegime reg{1.0, 20.0, 1.0};
  CHECK(steady_profile_css(1e4, reg) == doctest::Approx(0.0));
  double prev = steady_profile_css(0.1 * reg.L_minus, reg);
  for (double r = 0.11 * reg.L_minus; r <= 10.0 * reg.L_minus; r += 0.01 * reg.L_minus) {
    const double c = steady_profile_css(r, reg);
    CHECK(c < prev);
    prev = c;
  }
}

TEST_CASE("steady profile equals the orbit value just before the agent returns") {
  SwarmParams p;
  p.l_s = 0.01;
  p.v_o = 0.04;
  p.w = p.l_s;  // L_w = 1
  p.k_minus = p.v_o / (20.0 * p.l_s);  // L_minus = 20
  p.k_plus = p.k_minus;
  p.h = p.l_s / 40.0;
  const double r = 3.0 * p.l_s;
  p.L = std::ceil(2.0 * (r + 3.0 * p.l_s) / p.h) * p.h;
  p.dt = 0.2 * p.h / p.v_o;
  const auto orbit = forced_orbit_field(p, r, 12.0 / p.k_minus);
  const Vec2 c{0.5 * orbit.grid.width(), 0.5 * orbit.grid.height()};
  const double ahead = orbit.angle + (0.5 * p.w + 2.0 * p.h) / r;
  const double sim = sample_bilinear(orbit.grid, c + heading_vec(ahead) * r);
  CHECK(sim == doctest::Approx(steady_profile_css(3.0, p.regime())).epsilon(0.05));
}

TEST_CASE("implicit radius") {
  SUBCASE("dense scan oracle") {
    const TrapRegime reg{3.0, 100.0, 1.0};
    const double G = 5.0;
    const auto root = implicit_radius_large_decay(reg, G);
    REQUIRE(root);
    // smallest sign change of rhs − r above ½ on a fine grid, then bisect
    double lo = 0.5, step = 1e-4;
    auto f = [&](double r) { return implicit_radius_rhs(r, reg, G) - r; };
    while (f(lo + step) < 0.0) lo += step;
    double hi = lo + step;
    for (int i = 0; i < 100; ++i) {
      const double m = 0.5 * (lo + hi);
      (f(m) < 0.0 ? lo : hi) = m;
    }
    CHECK(std::abs(*root - lo) < 1e-6 * lo);
  }
  SUBCASE("linear limit at very long decay length") {
    const TrapRegime reg{3.0, 1e7, 1.0};
    const auto root = implicit_radius_large_decay(reg, 5.0);
    REQUIRE(root);
    CHECK(*root == doctest::Approx(3.0 * 5.0 / (2.0 * kPi)).epsilon(1e-6));
  }
  SUBCASE("vanishing gain has no root") {
    CHECK_FALSE(implicit_radius_large_decay({3.0, 100.0, 1.0}, 1e-4));
    CHECK_FALSE(implicit_radius_large_decay({3.0, 100.0, 1.0}, 0.0));
  }
}

TEST_CASE("circle fit and trap detection") {
  const double rho = 0.02;
  std::vector<double> t;
  std::vector<Vec2> circle, line;
  for (int i = 0; i <= 4000; ++i) {
    const double s = 0.01 * i;
    t.push_back(s);
    circle.push_back(Vec2{0.1, 0.1} + heading_vec(2.0 * s) * rho);
    line.push_back({0.04 * s, 0.0});
  }
  const auto v = detect_trap(t, circle, 10.0, 0.05);
  CHECK(v.determinate);
  CHECK(v.trapped);
  CHECK(v.radius == doctest::Approx(rho).epsilon(0.01));
  CHECK(v.center.x == doctest::Approx(0.1));
  const auto s = detect_trap(t, line, 10.0, 0.05);
  CHECK(s.determinate);
  CHECK_FALSE(s.trapped);
  const auto brief = detect_trap(std::span(t).first(500), std::span(circle).first(500), 10.0, 0.05);
  CHECK_FALSE(brief.determinate);
}

TEST_CASE("precessing constant-gradient orbit is trapped") {
  KinematicParams k;
  const double lambda = 50.0;  // r* = v_o/(G λ) = 0.08 m
  AgentState s;
  s.r = {0.085, 0.0};
  s.theta = kPi / 2.0 + 0.1;
  const auto run = simulate_constant_gradient(lambda, k, s, 0.01, 400.0, 5);
  const auto v = detect_trap(run.t, run.pos, 60.0, 0.2);
  CHECK(v.trapped);
  CHECK(v.radius == doctest::Approx(0.08).epsilon(0.1));
}

TEST_CASE("trap trials are reproducible") {
  SwarmParams p;
  p.G = 0.6;
  TrapTrialSpec spec;
  spec.duration = 10.0;
  spec.window = 3.0;
  spec.seed = 17;
  const auto a = run_trap_trial(p, spec);
  const auto b = run_trap_trial(p, spec);
  CHECK(a.trapped == b.trapped);
  CHECK(a.radius == b.radius);
}
