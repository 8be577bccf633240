#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "rantsim/trap.hpp"
#include "rantsim/world.hpp"

using namespace rantsim;

namespace {
// one agent at the arena centre facing +x, a single element placed by the caller
WorldState lone_agent(const WorldParams& p, Vec2 element) {
  WorldState w = make_world(p);
  w.agents.resize(1);
  w.agents[0].r = {0.3, 0.3};
  w.agents[0].theta = 0.0;
  w.agents[0].d = +1;
  w.substrate.assign(1, SubstrateElement{element, p.element_radius, -1});
  return w;
}

WorldParams quiet_params() {
  WorldParams p;
  p.n_agents = 1;
  p.n_elements = 0;
  p.early_stop_window = 0.0;
  return p;
}
}  // namespace

TEST_CASE("arena and parameter validation") {
  WorldParams p;
  CHECK_NOTHROW(p.validate());
  const Rect area = p.arena.construction_area();
  CHECK(area.width() == doctest::Approx(0.48));
  CHECK(area.height() == doctest::Approx(0.35));
  CHECK(area.x0 == doctest::Approx(0.5 * (0.67 - 0.48)));
  p.arena.build_width = 0.8;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = WorldParams{};
  p.n_agents = -1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK(element_layout_from_string("layers") == ElementLayout::layers);
  CHECK_THROWS_AS(element_layout_from_string("heap"), ConfigError);
}

TEST_CASE("obstacle detection") {
  const auto p = quiet_params();
  const double R = p.agent_radius, r = p.element_radius;

  SUBCASE("element dead ahead at 2 mm") {
    const auto w = lone_agent(p, {0.3 + R + r + 0.002, 0.3});
    const auto d = ir_detect(w.agents[0], w, p);
    CHECK(d.element);
    CHECK(d.element_id == 0);
    CHECK(d.gap == doctest::Approx(0.002));
  }
  SUBCASE("element 4 mm ahead is out of range") {
    const auto w = lone_agent(p, {0.3 + R + r + 0.004, 0.3});
    CHECK_FALSE(ir_detect(w.agents[0], w, p).element);
  }
  SUBCASE("element behind") {
    const auto w = lone_agent(p, {0.3 - R - r - 0.001, 0.3});
    CHECK_FALSE(ir_detect(w.agents[0], w, p).element);
  }
  SUBCASE("element outside the cone") {
    const double a = 30.0 * kPi / 180.0;
    const double dist = R + r + 0.001;
    const auto w = lone_agent(p, {0.3 + dist * std::cos(a), 0.3 + dist * std::sin(a)});
    CHECK_FALSE(ir_detect(w.agents[0], w, p).element);
  }
  SUBCASE("carried elements are invisible") {
    auto w = lone_agent(p, {0.3 + R + r + 0.001, 0.3});
    w.substrate[0].carrier = 7;
    CHECK_FALSE(ir_detect(w.agents[0], w, p).element);
  }
  SUBCASE("nearest of several") {
    auto w = lone_agent(p, {0.3 + R + r + 0.0025, 0.3});
    w.substrate.push_back({{0.3 + R + r + 0.0005, 0.301}, r, -1});
    w.substrate.push_back({{0.3 + R + r + 0.0015, 0.299}, r, -1});
    // brute force over free elements in range
    int best = -1;
    double gap = 1e9;
    for (std::size_t k = 0; k < w.substrate.size(); ++k) {
      const double g = (w.substrate[k].pos - w.agents[0].r).norm() - R - r;
      if (g < gap) {
        gap = g;
        best = static_cast<int>(k);
      }
    }
    const auto d = ir_detect(w.agents[0], w, p);
    CHECK(d.element_id == best);
    CHECK(d.gap == doctest::Approx(gap));
  }
  SUBCASE("walls") {
    auto w = lone_agent(p, {0.1, 0.1});
    w.agents[0].r = {p.arena.width - R - 0.002, 0.3};
    CHECK(ir_detect(w.agents[0], w, p).wall);
    w.agents[0].theta = kPi;
    CHECK_FALSE(ir_detect(w.agents[0], w, p).wall);
  }
}

TEST_CASE("attach and detach") {
  const auto p = quiet_params();
  const Vec2 spot{0.3 + p.agent_radius + p.element_radius + 0.001, 0.3};
  auto w = lone_agent(p, spot);

  REQUIRE(attach(w, 0, 0));
  CHECK(w.agents[0].carrying);
  CHECK(w.agents[0].d == -1);
  CHECK(w.substrate[0].carrier == 0);
  CHECK_FALSE(attach(w, 0, 0));  // already carrying / already carried
  REQUIRE(detach(w, 0));
  CHECK(std::abs(w.substrate[0].pos.x - spot.x) < 1e-9);
  CHECK(std::abs(w.substrate[0].pos.y - spot.y) < 1e-9);
  CHECK(w.substrate[0].free());
  CHECK_FALSE(detach(w, 0));

  // a second agent cannot take an element that is carried
  w.agents.push_back(w.agents[0]);
  w.agents[1].id = 1;
  w.memory.resize(2);
  w.rngs.push_back(w.rngs[0]);
  w.carried.assign(2, -1);
  w.carry_offset.assign(2, {});
  w.turn_rate.assign(2, 0.0);
  w.last_action.assign(2, Action::none);
  REQUIRE(attach(w, 1, 0));
  const auto before = w.substrate[0];
  CHECK_FALSE(attach(w, 0, 0));
  CHECK(w.substrate[0].carrier == before.carrier);
  CHECK_FALSE(w.agents[0].carrying);
}

TEST_CASE("carried element follows its carrier rigidly") {
  auto p = quiet_params();
  // no photormone → zero turning; firmware release needs c < 0, which never happens
  p.k_plus = 0.0;
  p.behavior.K = -1.0;
  p.behavior.thresholds_enabled = false;
  const Vec2 spot{0.3 + p.agent_radius + p.element_radius + 0.001, 0.3};
  auto w = lone_agent(p, spot);

  const auto ev = step_world(w, p);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].action == Action::fetch);
  const Vec2 start = w.substrate[0].pos;
  const Vec2 agent0 = w.agents[0].r;
  const int ticks = static_cast<int>(std::lround(1.0 / p.sim.dt));
  for (int i = 0; i < ticks; ++i) step_world(w, p);
  CHECK(w.substrate[0].carrier == 0);
  CHECK((w.substrate[0].pos - start).norm() == doctest::Approx(0.04).epsilon(1e-9));
  CHECK(w.substrate[0].pos.x < start.x);
  CHECK((w.substrate[0].pos - w.agents[0].r).norm() ==
        doctest::Approx((start - agent0).norm()).epsilon(1e-9));
}

TEST_CASE("two agents reaching for one element: lower id wins") {
  auto p = quiet_params();
  p.n_agents = 2;
  p.k_plus = 0.0;
  p.behavior.K = -1.0;
  p.behavior.thresholds_enabled = false;
  WorldState w = make_world(p);
  const double gap = p.agent_radius + p.element_radius + 0.001;
  const Vec2 e{0.3, 0.3};
  w.substrate.assign(1, SubstrateElement{e, p.element_radius, -1});
  w.agents[0].r = {e.x - gap, e.y};
  w.agents[0].theta = 0.0;
  w.agents[1].r = {e.x + gap, e.y};
  w.agents[1].theta = kPi;

  const auto ev = step_world(w, p);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].agent == 0);
  CHECK(ev[0].action == Action::fetch);
  CHECK(ev[1].agent == 1);
  CHECK(ev[1].action == Action::avoid);
  CHECK(w.substrate[0].carrier == 0);
  CHECK_FALSE(w.agents[1].carrying);
}

TEST_CASE("empty world: field decays, substrate static") {
  WorldParams p;
  p.n_agents = 0;
  p.early_stop_window = 0.0;
  auto w = make_world(p);
  for (double& v : w.field.values()) v = 1.0;
  const auto sub = w.substrate;
  const int n = 100;
  for (int i = 0; i < n; ++i) CHECK(step_world(w, p).empty());
  const double expect = std::exp(-p.k_minus * n * p.sim.dt);
  CHECK(w.field.max_value() == doctest::Approx(expect).epsilon(1e-12));
  for (std::size_t k = 0; k < sub.size(); ++k) CHECK(w.substrate[k].pos == sub[k].pos);
  CHECK(w.t == doctest::Approx(n * p.sim.dt));
}

TEST_CASE("run invariants") {
  WorldParams p;
  p.kin.G = 0.04;
  p.sim.seed = 4;
  p.sim.total_time = 60.0;
  p.early_stop_window = 0.0;
  auto w = make_world(p);
  const std::size_t n_elem = w.substrate.size();
  CHECK(n_elem == 200);
  int actions = 0;
  while (!world_finished(w, p)) {
    actions += static_cast<int>(step_world(w, p).size());
    CHECK(w.substrate.size() == n_elem);
    CHECK(w.carried_count() <= static_cast<int>(w.agents.size()));
    for (std::size_t i = 0; i < w.agents.size(); ++i) {
      const auto& s = w.agents[i];
      CHECK(s.r.x >= p.agent_radius);
      CHECK(s.r.x <= p.arena.width - p.agent_radius);
      CHECK(s.r.y >= p.agent_radius);
      CHECK(s.r.y <= p.arena.height - p.agent_radius);
      const int k = w.carried[i];
      CHECK(s.carrying == (k >= 0));
      if (k >= 0) CHECK(w.substrate[static_cast<std::size_t>(k)].carrier == static_cast<int>(i));
    }
    for (const auto& e : w.substrate) {
      CHECK(e.pos.x >= e.radius - 1e-12);
      CHECK(e.pos.x <= p.arena.width - e.radius + 1e-12);
    }
  }
  CHECK(actions > 0);
}

TEST_CASE("released elements do not overlap free ones by more than 10% of a radius") {
  WorldState w = make_world(quiet_params());
  const double r = 0.011;
  w.substrate = {{{0.3, 0.3}, r, -1}, {{0.3 + 0.5 * r, 0.3}, r, -1}, {{0.1, 0.1}, r, -1}};
  settle_element(w, 1);
  CHECK((w.substrate[1].pos - w.substrate[0].pos).norm() >= 2.0 * r - 0.1 * r);
  CHECK(w.substrate[1].pos.y == doctest::Approx(0.3));

  // pushed against the wall stays in the arena
  w.substrate = {{{0.011, 0.3}, r, -1}, {{0.0, 0.3}, r, -1}};
  settle_element(w, 1);
  CHECK(w.substrate[1].pos.x >= r);
}

TEST_CASE("identical seeds give identical hashes at every tick") {
  WorldParams p;
  p.sim.total_time = 20.0;
  p.early_stop_window = 0.0;
  p.kin.G = 0.04;
  auto a = make_world(p);
  auto b = make_world(p);
  bool same = true;
  while (!world_finished(a, p)) {
    step_world(a, p);
    step_world(b, p);
    same = same && a.hash() == b.hash();
  }
  CHECK(same);
  p.sim.seed = 2;
  auto c = make_world(p);
  while (!world_finished(c, p)) step_world(c, p);
  CHECK(c.hash() != a.hash());
}

TEST_CASE("a lone phototactic agent above the critical gain orbits its own trail") {
  auto p = quiet_params();
  p.behavior.K = -1.0;  // free agents phototactic
  p.behavior.C = 1.0;
  p.kin.G = 0.1;
  p.sim.total_time = 300.0;
  auto w = make_world(p);
  std::vector<double> t;
  std::vector<Vec2> pos;
  while (!world_finished(w, p)) {
    step_world(w, p);
    if (w.tick % 5 == 0) {
      t.push_back(w.t);
      pos.push_back(w.agents[0].r);
    }
  }
  const auto v = detect_trap(t, pos, 30.0, 0.14);
  CHECK(v.determinate);
  CHECK(v.trapped);
  CHECK(v.radius < 0.02);
}

TEST_CASE("trace writers") {
  auto w = make_world(quiet_params());
  std::ostringstream os;
  write_agent_trace_header(os);
  write_agent_trace(os, w);
  write_events_csv(os, {{1.0, 0, Action::fetch, 3}}, true);
  const std::string s = os.str();
  CHECK(s.find("fetch") != std::string::npos);
}

TEST_CASE("early stop is armed by the first change in the area") {
  WorldParams p = quiet_params();
  p.early_stop_window = 60.0;
  p.sim.total_time = 600.0;
  WorldState w = make_world(p);
  w.t = 300.0;
  CHECK_FALSE(world_finished(w, p));
  w.last_change = 250.0;
  CHECK_FALSE(world_finished(w, p));
  w.t = 310.0;
  CHECK(world_finished(w, p));
  p.early_stop_window = 0.0;
  CHECK_FALSE(world_finished(w, p));
  w.t = 600.0;
  CHECK(world_finished(w, p));
}
