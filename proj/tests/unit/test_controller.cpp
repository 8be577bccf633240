#include "doctest.h"
#include "rantsim/controller.hpp"

#include <cmath>

using namespace rantsim;

TEST_CASE("turning law") {
  BehaviorParams p;
  p.C = 1.0;
  CHECK(turning_law(0.3, 0.3, 0.25, p, 1) == 0.0);
  p.C = 0.0;
  for (double W : {-0.7, 0.1, 0.5, 2.3}) {
    CHECK(turning_law(4.0, 0.0, W, p, 1) == doctest::Approx(p.b * std::sin(kPi * W) / p.l_s));
    CHECK(turning_law(0.0, 0.0, W, p, -1) == turning_law(1.0, 3.0, W, p, 1));
  }
  p.C = 1.0;
  p.K = 1.0;
  p.c_max = 5.0;
  CHECK(turning_law(5.0, 0.0, 0.0, p, 1) == doctest::Approx(std::tanh(50.0) / 0.01));
  CHECK(turning_law(5.0, 0.0, 0.0, p, 1) == doctest::Approx(100.0));
  CHECK(turning_law(5.0, 0.0, 0.0, p, -1) == doctest::Approx(-100.0));
  p.C = 0.4;
  const double bound = (p.C + (1 - p.C) * p.b) / p.l_s;
  for (double W : {0.0, 0.5, 1.5})
    for (double dc : {-5.0, -0.01, 0.0, 2.0}) CHECK(std::abs(turning_law(dc, 0.0, W, p, 1)) <= bound + 1e-12);
}

TEST_CASE("wheel speeds") {
  KinematicParams k;
  auto w = wheel_speeds(0.0, 1, k, 1e-2);
  CHECK(w.left == k.v_o);
  CHECK(w.right == k.v_o);
  w = wheel_speeds(10.0, 1, k, 1e-2);
  CHECK(w.left == doctest::Approx(0.0385));
  CHECK(w.right == doctest::Approx(0.0415));
  const auto r = wheel_speeds(10.0, -1, k, 1e-2);
  CHECK(r.left == -w.left);
  CHECK(r.right == -w.right);
  const auto b = body_rates(w, k);
  CHECK(b.v == doctest::Approx(k.v_o));
  CHECK(b.omega == doctest::Approx(1e-2 * 10.0));
}

TEST_CASE("threshold inequalities") {
  BehaviorParams p;
  p.K = 1.0;
  p.C = 1.0;
  p.c_bar = 0.5;
  p.delta_c = 0.1;
  CHECK(fetch_condition(0.7, p));
  CHECK_FALSE(fetch_condition(0.55, p));
  CHECK(release_condition(0.3, p));
  CHECK_FALSE(release_condition(0.45, p));
  // hysteresis: no value both fetches and releases
  for (double c = 0.0; c < 1.0; c += 0.01) CHECK_FALSE((fetch_condition(c, p) && release_condition(c, p)));
  p.C = 0.0;
  for (double c : {0.0, 1.0, 100.0}) CHECK_FALSE(fetch_condition(c, p));
  p.c_independent_threshold = true;
  CHECK(fetch_condition(0.7, p));
  // negating K flips the direction of the fetch inequality
  p.c_independent_threshold = false;
  p.C = 1.0;
  p.K = -1.0;
  CHECK(fetch_condition(0.3, p));   // −c > −(0.5 − 0.1)
  CHECK_FALSE(fetch_condition(0.7, p));
  p.thresholds_enabled = false;
  CHECK(fetch_condition(0.0, p));
}

TEST_CASE("behavior tick branches") {
  BehaviorParams p;
  p.K = 1.0;
  p.C = 1.0;
  p.c_bar = 0.5;
  p.delta_c = 0.1;
  BehaviorMemory mem;
  RngStream rng(9);
  AgentState s;

  SUBCASE("fetch when above the high threshold") {
    const auto out = behavior_tick({0, 0, 0.7, true}, s, p, mem, rng, 0.02);
    CHECK(out.action == Action::fetch);
    CHECK(out.d == -1);
  }
  SUBCASE("avoid otherwise, with a rotation in [-pi, pi]") {
    for (int i = 0; i < 50; ++i) {
      const auto out = behavior_tick({0, 0, 0.55, true}, s, p, mem, rng, 0.02);
      CHECK(out.action == Action::avoid);
      CHECK(out.d == 1);
      CHECK(std::abs(out.rotation) <= kPi);
    }
  }
  SUBCASE("release below the low threshold while reversing") {
    s.d = -1;
    s.carrying = true;
    const auto out = behavior_tick({0, 0, 0.3, true}, s, p, mem, rng, 0.02);
    CHECK(out.action == Action::release);
    CHECK(out.d == 1);
    const auto hold = behavior_tick({0, 0, 0.45, true}, s, p, mem, rng, 0.02);
    CHECK(hold.action == Action::none);
    CHECK(hold.d == -1);
  }
  SUBCASE("no obstacle resets to forward") {
    s.d = -1;
    const auto out = behavior_tick({0, 0, 0.3, false}, s, p, mem, rng, 0.02);
    CHECK(out.action == Action::reset_forward);
    CHECK(out.d == 1);
    s.d = 1;
    CHECK(behavior_tick({0, 0, 0.3, false}, s, p, mem, rng, 0.02).action == Action::none);
  }
  SUBCASE("fractional K is a success probability") {
    p.K = 0.25;
    p.thresholds_enabled = false;
    int fetched = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i)
      fetched += behavior_tick({0, 0, 1.0, true}, s, p, mem, rng, 0.02).action == Action::fetch;
    // binomial 3σ
    CHECK(std::abs(fetched - 0.25 * n) < 3.0 * std::sqrt(n * 0.25 * 0.75));
  }
}

TEST_CASE("tick is reproducible from the seed") {
  BehaviorParams p;
  p.C = 0.5;
  BehaviorMemory m1, m2;
  RngStream r1(4), r2(4);
  AgentState s;
  for (int i = 0; i < 100; ++i) {
    const auto a = behavior_tick({0.2, 0.1, 0.3, i % 3 == 0}, s, p, m1, r1, 0.02);
    const auto b = behavior_tick({0.2, 0.1, 0.3, i % 3 == 0}, s, p, m2, r2, 0.02);
    CHECK(a.omega == b.omega);
    CHECK(a.rotation == b.rotation);
  }
}

TEST_CASE("validation") {
  BehaviorParams p;
  p.C = 1.5;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("behavior.C"), ConfigError);
  p = BehaviorParams{};
  p.delta_c = 3.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("c_bar"), ConfigError);
  p = BehaviorParams{};
  p.K = -1.2;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
