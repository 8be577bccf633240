#include "rantsim/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ostream>

namespace rantsim {

Rect Arena::construction_area() const {
  const double x0 = 0.5 * (width - build_width);
  const double y0 = 0.5 * (height - build_height);
  return {x0, y0, x0 + build_width, y0 + build_height};
}

void Arena::validate() const {
  if (!(width > 0.0)) throw ConfigError("arena.width: must be > 0");
  if (!(height > 0.0)) throw ConfigError("arena.height: must be > 0");
  if (!(build_width > 0.0 && build_width <= width))
    throw ConfigError("arena.build_width: must lie in (0, arena.width]");
  if (!(build_height > 0.0 && build_height <= height))
    throw ConfigError("arena.build_height: must lie in (0, arena.height]");
}

const char* to_string(ElementLayout l) {
  return l == ElementLayout::boundary ? "boundary" : "layers";
}

ElementLayout element_layout_from_string(const std::string& s) {
  if (s == "boundary") return ElementLayout::boundary;
  if (s == "layers") return ElementLayout::layers;
  throw ConfigError("world.layout: expected boundary|layers, got '" + s + "'");
}

BehaviorParams WorldParams::firmware_behavior() const {
  BehaviorParams b = behavior;
  b.K = firmware_K();
  b.l_s = kin.l_s;
  return b;
}

void WorldParams::validate() const {
  if (!(sim.dt > 0.0)) throw ConfigError("sim.dt: must be > 0");
  if (!(sim.total_time >= 0.0)) throw ConfigError("sim.total_time: must be >= 0");
  arena.validate();
  kin.validate();
  behavior.validate();
  if (firmware_k_sign != 1 && firmware_k_sign != -1)
    throw ConfigError("world.firmware_k_sign: must be +1 or -1");
  if (n_agents < 0) throw ConfigError("world.n_agents: must be >= 0");
  if (n_elements < 0) throw ConfigError("world.n_elements: must be >= 0");
  if (layers < 1) throw ConfigError("world.layers: must be >= 1");
  if (!(element_radius > 0.0)) throw ConfigError("world.element_radius: must be > 0");
  if (!(element_gap >= 0.0)) throw ConfigError("world.element_gap: must be >= 0");
  if (!(agent_radius > 0.0)) throw ConfigError("world.agent_radius: must be > 0");
  if (!(detect_range >= 0.0)) throw ConfigError("world.detect_range: must be >= 0");
  if (!(detect_half_angle > 0.0 && detect_half_angle < kPi))
    throw ConfigError("world.detect_half_angle: must lie in (0, pi)");
  if (!(production_diameter > 0.0)) throw ConfigError("photormone.production_diameter: must be > 0");
  if (!(k_plus >= 0.0)) throw ConfigError("photormone.k_plus: must be >= 0");
  if (!(k_minus > 0.0)) throw ConfigError("photormone.k_minus: must be > 0");
  if (!(D_c >= 0.0)) throw ConfigError("photormone.D_c: must be >= 0");
  if (!(field_h > 0.0)) throw ConfigError("photormone.h: must be > 0");
  if (!(seed_diameter > 0.0)) throw ConfigError("photormone.seed_diameter: must be > 0");
  if (sim.dt * k_minus >= 1.0) throw ConfigError("sim.dt: dt * k_minus must be < 1");
  if (D_c > 0.0 && sim.dt * D_c / (field_h * field_h) > 0.25)
    throw ConfigError("sim.dt: dt * D_c / h^2 must be <= 0.25");
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kLayoutStream = 0x4c41594f5554ULL;

std::vector<SubstrateElement> boundary_layout(const WorldParams& p) {
  std::vector<SubstrateElement> out;
  const double er = p.element_radius;
  const double pitch = 2.0 * er + p.element_gap;
  int remaining = p.n_elements;
  for (int ring = 0; remaining > 0; ++ring) {
    const double inset = er + p.element_gap + ring * pitch;
    const double w = p.arena.width - 2.0 * inset;
    const double h = p.arena.height - 2.0 * inset;
    if (w <= 0.0 || h <= 0.0) throw ConfigError("world.n_elements: does not fit along the boundary");
    const double perim = 2.0 * (w + h);
    const int cap = static_cast<int>(std::floor(perim / pitch));
    const int n = std::min(cap, remaining);
    const double step = perim / n;
    for (int k = 0; k < n; ++k) {
      double s = (k + 0.5) * step;
      Vec2 q;
      if (s < w) {
        q = {inset + s, inset};
      } else if ((s -= w) < h) {
        q = {inset + w, inset + s};
      } else if ((s -= h) < w) {
        q = {inset + w - s, inset + h};
      } else {
        s -= w;
        q = {inset, inset + h - s};
      }
      out.push_back({q, er, -1});
    }
    remaining -= n;
  }
  return out;
}

// Hexagonal rows along the y = 0 wall. Returns the y of the substrate edge.
double layered_layout(const WorldParams& p, std::vector<SubstrateElement>& out) {
  const double er = p.element_radius;
  const double pitch = 2.0 * er + p.element_gap;
  const double row_dy = pitch * std::sqrt(3.0) / 2.0;
  int remaining = p.n_elements;
  double top = 0.0;
  for (int row = 0; row < p.layers && remaining > 0; ++row) {
    const double y = er + p.element_gap + row * row_dy;
    const double x_start = er + p.element_gap + (row % 2 ? 0.5 * pitch : 0.0);
    for (double x = x_start; x <= p.arena.width - er && remaining > 0; x += pitch) {
      out.push_back({{x, y}, er, -1});
      --remaining;
    }
    top = y + er;
  }
  return top;
}

Vec2 body_to_world(const AgentState& s, Vec2 off) {
  return s.r + heading_vec(s.theta) * off.x + left_normal(s.theta) * off.y;
}

void fnv(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* b = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= b[i];
    h *= 0x100000001b3ULL;
  }
}

template <class T>
void fnv_val(std::uint64_t& h, T v) {
  fnv(h, &v, sizeof v);
}

}  // namespace

WorldState make_world(const WorldParams& p) {
  p.validate();
  WorldState w;
  w.arena = p.arena;
  const Rect area = p.arena.construction_area();

  double substrate_edge = 0.0;
  if (p.layout == ElementLayout::boundary) {
    w.substrate = boundary_layout(p);
  } else {
    substrate_edge = layered_layout(p, w.substrate);
  }

  const auto nx = static_cast<std::size_t>(std::llround(area.width() / p.field_h));
  const auto ny = static_cast<std::size_t>(std::llround(area.height() / p.field_h));
  w.field = PhotormoneGrid(nx, ny, area.width() / static_cast<double>(nx), {area.x0, area.y0});
  w.field.k_plus = p.k_plus;
  w.field.k_minus = p.k_minus;
  w.field.D_c = p.D_c;
  w.field.w = 0.5 * p.production_diameter;
  w.field.boundary = BoundaryMode::walls;
  w.field.outside = OutsidePolicy::zero;
  if (p.seed_photormone) {
    const Vec2 c{0.5 * p.arena.width, substrate_edge};
    const double r2 = 0.25 * p.seed_diameter * p.seed_diameter;
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i)
        if ((w.field.cell_center(i, j) - c).norm2() <= r2) w.field.at(i, j) = p.seed_value;
  }

  const RngStream base(p.sim.seed);
  RngStream layout = base.substream(kLayoutStream);
  const double clear = p.agent_radius + p.element_radius;
  for (int i = 0; i < p.n_agents; ++i) {
    AgentState a;
    a.id = i;
    for (int attempt = 0;; ++attempt) {
      a.r = {layout.uniform(area.x0 + p.agent_radius, area.x1 - p.agent_radius),
             layout.uniform(area.y0 + p.agent_radius, area.y1 - p.agent_radius)};
      const bool blocked = std::any_of(w.substrate.begin(), w.substrate.end(), [&](const auto& e) {
        return (e.pos - a.r).norm() < clear;
      });
      if (!blocked) break;
      if (attempt > 10000) throw ConfigError("world.n_agents: no free space to place agents");
    }
    a.theta = layout.uniform(-kPi, kPi);
    w.agents.push_back(a);
    w.rngs.push_back(base.substream(static_cast<std::uint64_t>(i) + 1));
  }
  w.memory.assign(w.agents.size(), {});
  w.carried.assign(w.agents.size(), -1);
  w.carry_offset.assign(w.agents.size(), {});
  w.turn_rate.assign(w.agents.size(), 0.0);
  w.last_action.assign(w.agents.size(), Action::none);
  return w;
}

std::uint64_t WorldState::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  fnv_val(h, t);
  for (const auto& a : agents) {
    fnv_val(h, a.r.x);
    fnv_val(h, a.r.y);
    fnv_val(h, a.theta);
    fnv_val(h, a.d);
    fnv_val(h, a.carrying);
  }
  for (const auto& e : substrate) {
    fnv_val(h, e.pos.x);
    fnv_val(h, e.pos.y);
    fnv_val(h, e.carrier);
  }
  const auto v = field.values();
  fnv(h, v.data(), v.size_bytes());
  return h;
}

int WorldState::carried_count() const {
  return static_cast<int>(std::count_if(substrate.begin(), substrate.end(),
                                        [](const auto& e) { return !e.free(); }));
}

IrDetection ir_detect(const AgentState& s, const WorldState& w, const WorldParams& p) {
  IrDetection out;
  const Vec2 fwd = heading_vec(s.theta);
  const double cos_cone = std::cos(p.detect_half_angle);
  double best = 0.0;
  for (std::size_t k = 0; k < w.substrate.size(); ++k) {
    const auto& e = w.substrate[k];
    if (!e.free()) continue;
    const Vec2 rel = e.pos - s.r;
    const double dist = rel.norm();
    const double gap = dist - p.agent_radius - e.radius;
    if (gap > p.detect_range) continue;
    if (dist > 0.0 && rel.dot(fwd) < cos_cone * dist) continue;
    if (!out.element || gap < best) {
      out.element = true;
      out.element_id = static_cast<int>(k);
      out.gap = gap;
      best = gap;
    }
  }
  // walls: outward normals −x, +x, −y, +y
  const double reach = p.agent_radius + p.detect_range;
  const struct {
    double dist;
    Vec2 n;
  } walls[] = {{s.r.x, {-1, 0}},
               {w.arena.width - s.r.x, {1, 0}},
               {s.r.y, {0, -1}},
               {w.arena.height - s.r.y, {0, 1}}};
  for (const auto& wall : walls)
    if (wall.dist <= reach && fwd.dot(wall.n) >= cos_cone) out.wall = true;
  return out;
}

bool attach(WorldState& w, int a, int element) {
  if (a < 0 || a >= static_cast<int>(w.agents.size())) return false;
  if (element < 0 || element >= static_cast<int>(w.substrate.size())) return false;
  auto& e = w.substrate[static_cast<std::size_t>(element)];
  auto& s = w.agents[static_cast<std::size_t>(a)];
  if (!e.free() || w.carried[static_cast<std::size_t>(a)] >= 0) return false;
  const Vec2 rel = e.pos - s.r;
  w.carry_offset[static_cast<std::size_t>(a)] = {rel.dot(heading_vec(s.theta)),
                                                 rel.dot(left_normal(s.theta))};
  e.carrier = a;
  w.carried[static_cast<std::size_t>(a)] = element;
  s.carrying = true;
  s.d = -1;
  return true;
}

bool detach(WorldState& w, int a) {
  if (a < 0 || a >= static_cast<int>(w.agents.size())) return false;
  const int k = w.carried[static_cast<std::size_t>(a)];
  if (k < 0) return false;
  auto& s = w.agents[static_cast<std::size_t>(a)];
  auto& e = w.substrate[static_cast<std::size_t>(k)];
  e.pos = body_to_world(s, w.carry_offset[static_cast<std::size_t>(a)]);
  e.carrier = -1;
  w.carried[static_cast<std::size_t>(a)] = -1;
  s.carrying = false;
  return true;
}

void settle_element(WorldState& w, int element) {
  auto& e = w.substrate[static_cast<std::size_t>(element)];
  auto keep_inside = [&] {
    e.pos.x = std::clamp(e.pos.x, e.radius, w.arena.width - e.radius);
    e.pos.y = std::clamp(e.pos.y, e.radius, w.arena.height - e.radius);
  };
  keep_inside();
  for (int pass = 0; pass < 32; ++pass) {
    bool moved = false;
    for (std::size_t k = 0; k < w.substrate.size(); ++k) {
      if (static_cast<int>(k) == element || !w.substrate[k].free()) continue;
      const auto& o = w.substrate[k];
      const double contact = e.radius + o.radius;
      Vec2 rel = e.pos - o.pos;
      double dist = rel.norm();
      if (contact - dist <= 0.1 * e.radius) continue;
      if (dist == 0.0) {
        rel = {1.0, 0.0};
        dist = 1.0;
      }
      e.pos = o.pos + rel * (contact / dist);
      keep_inside();
      moved = true;
    }
    if (!moved) break;
  }
}

std::vector<WorldEvent> step_world(WorldState& w, const WorldParams& p) {
  const double dt = p.sim.dt;
  const std::size_t n = w.agents.size();
  const BehaviorParams fw = p.firmware_behavior();
  const Rect area = w.arena.construction_area();
  std::vector<WorldEvent> events;

  // (1) sense
  std::vector<BehaviorInputs> in(n);
  std::vector<IrDetection> ir(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = w.agents[i];
    const SensorReading sr = sensor_pair_read(w.field, s.r, s.theta, p.kin.l_s);
    ir[i] = ir_detect(s, w, p);
    in[i] = {sr.left, sr.right, sample_bilinear(w.field, s.r),
             s.carrying || ir[i].element || ir[i].wall};
  }

  // (2) controller, actions resolved in id order
  std::vector<double> omega(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = w.agents[i];
    const ControlOutput out = behavior_tick(in[i], s, fw, w.memory[i], w.rngs[i], dt);
    omega[i] = out.omega;
    Action act = out.action;
    int element = -1;
    switch (act) {
      case Action::fetch:
        // a wall, or an element claimed earlier this tick, cannot be fetched
        if (ir[i].element && attach(w, static_cast<int>(i), ir[i].element_id)) {
          element = ir[i].element_id;
        } else {
          act = Action::avoid;
          s.theta = wrap_angle(s.theta + w.rngs[i].uniform(-kPi, kPi));
        }
        break;
      case Action::avoid:
        s.theta = wrap_angle(s.theta + out.rotation);
        break;
      case Action::release:
        element = w.carried[i];
        detach(w, static_cast<int>(i));
        if (element >= 0) settle_element(w, element);
        s.d = out.d;
        s.theta = wrap_angle(s.theta + out.rotation);
        break;
      case Action::reset_forward:
        if (s.carrying) {
          element = w.carried[i];
          detach(w, static_cast<int>(i));
          settle_element(w, element);
        }
        s.d = out.d;
        break;
      case Action::none:
        s.d = out.d;
        break;
    }
    w.last_action[i] = act;
    if (act != Action::none) events.push_back({w.t, static_cast<int>(i), act, element});
    if ((act == Action::fetch || act == Action::release) && element >= 0 &&
        area.contains(w.substrate[static_cast<std::size_t>(element)].pos))
      w.last_change = w.t + dt;
  }

  // (3) kinematics, (4) walls
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = w.agents[i];
    const WheelSpeeds ws = wheel_speeds(omega[i], s.d, p.kin, p.kin.G);
    const BodyRates br = body_rates(ws, p.kin);
    w.turn_rate[i] = br.omega;
    s = step_kinematics(s, br.omega, p.kin, dt);

    const double R = p.agent_radius;
    if (s.r.x < R) {
      s.r.x = 2.0 * R - s.r.x;
      s.theta = wrap_angle(kPi - s.theta);
    } else if (s.r.x > w.arena.width - R) {
      s.r.x = 2.0 * (w.arena.width - R) - s.r.x;
      s.theta = wrap_angle(kPi - s.theta);
    }
    if (s.r.y < R) {
      s.r.y = 2.0 * R - s.r.y;
      s.theta = wrap_angle(-s.theta);
    } else if (s.r.y > w.arena.height - R) {
      s.r.y = 2.0 * (w.arena.height - R) - s.r.y;
      s.theta = wrap_angle(-s.theta);
    }
    s.r.x = std::clamp(s.r.x, R, w.arena.width - R);
    s.r.y = std::clamp(s.r.y, R, w.arena.height - R);

    const int k = w.carried[i];
    if (k >= 0) {
      auto& e = w.substrate[static_cast<std::size_t>(k)];
      e.pos = body_to_world(s, w.carry_offset[i]);
      const Vec2 inside{std::clamp(e.pos.x, e.radius, w.arena.width - e.radius),
                        std::clamp(e.pos.y, e.radius, w.arena.height - e.radius)};
      const Vec2 push = inside - e.pos;
      if (push.norm2() > 0.0) {
        s.r += push;
        e.pos = inside;
      }
    }
  }

  if (p.agent_collisions) {
    const double contact = 2.0 * p.agent_radius;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Vec2 rel = w.agents[j].r - w.agents[i].r;
        const double dist = rel.norm();
        if (dist >= contact || dist == 0.0) continue;
        const Vec2 shift = rel * (0.5 * (contact - dist) / dist);
        w.agents[i].r -= shift;
        w.agents[j].r += shift;
      }
    for (auto& s : w.agents) {
      s.r.x = std::clamp(s.r.x, p.agent_radius, w.arena.width - p.agent_radius);
      s.r.y = std::clamp(s.r.y, p.agent_radius, w.arena.height - p.agent_radius);
    }
    for (std::size_t i = 0; i < n; ++i)
      if (w.carried[i] >= 0)
        w.substrate[static_cast<std::size_t>(w.carried[i])].pos =
            body_to_world(w.agents[i], w.carry_offset[i]);
  }

  // (5) photormone
  std::vector<SourceFootprint> src;
  src.reserve(n);
  for (const auto& s : w.agents)
    src.push_back({s.r, 0.5 * p.production_diameter, FootprintProfile::disk, 1.0});
  step_field(w.field, src, dt);

  w.t += dt;
  ++w.tick;
  return events;
}

bool world_finished(const WorldState& w, const WorldParams& p) {
  if (w.t >= p.sim.total_time - 0.5 * p.sim.dt) return true;
  // not armed before anything happened in the area
  return p.early_stop_window > 0.0 && w.last_change >= 0.0 &&
         w.t - w.last_change >= p.early_stop_window;
}

int elements_in_construction_area(const WorldState& w) {
  const Rect area = w.arena.construction_area();
  return static_cast<int>(std::count_if(w.substrate.begin(), w.substrate.end(),
                                        [&](const auto& e) { return area.contains(e.pos); }));
}

void write_agent_trace_header(std::ostream& os) {
  os << "t,id,x,y,theta,d,carrying,action\n";
}

void write_agent_trace(std::ostream& os, const WorldState& w) {
  char buf[192];
  for (std::size_t i = 0; i < w.agents.size(); ++i) {
    const auto& s = w.agents[i];
    std::snprintf(buf, sizeof buf, "%.4f,%d,%.17g,%.17g,%.17g,%d,%d,%s\n", w.t, s.id, s.r.x, s.r.y,
                  s.theta, s.d, s.carrying ? 1 : 0, to_string(w.last_action[i]));
    os << buf;
  }
}

void write_substrate_csv(std::ostream& os, const WorldState& w) {
  os << "id,x,y,radius,carrier\n";
  char buf[128];
  for (std::size_t k = 0; k < w.substrate.size(); ++k) {
    const auto& e = w.substrate[k];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%d\n", k, e.pos.x, e.pos.y, e.radius,
                  e.carrier);
    os << buf;
  }
}

void write_events_csv(std::ostream& os, const std::vector<WorldEvent>& events, bool header) {
  if (header) os << "t,agent,action,element\n";
  char buf[96];
  for (const auto& ev : events) {
    std::snprintf(buf, sizeof buf, "%.4f,%d,%s,%d\n", ev.t, ev.agent, to_string(ev.action),
                  ev.element);
    os << buf;
  }
}

}  // namespace rantsim
