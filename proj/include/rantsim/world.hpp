#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rantsim/agent.hpp"
#include "rantsim/controller.hpp"
#include "rantsim/core.hpp"
#include "rantsim/photormone.hpp"

namespace rantsim {

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

struct SubstrateElement {
  Vec2 pos;
  double radius = 0.011;
  int carrier = -1;  // agent id, −1 when free
  bool free() const { return carrier < 0; }
};

/// Walled rectangle with a centred construction area, where photormone is
/// projected and structures are scored.
struct Arena {
  double width = 0.67;
  double height = 0.56;
  double build_width = 0.48;
  double build_height = 0.35;

  Rect bounds() const { return {0.0, 0.0, width, height}; }
  Rect construction_area() const;
  void validate() const;
};

enum class ElementLayout { boundary, layers };
const char* to_string(ElementLayout l);
ElementLayout element_layout_from_string(const std::string& s);

struct WorldParams {
  SimConfig sim;  // dt, total_time, seed; width/height are ignored in favour of arena
  Arena arena;
  /// kin.G is the wheel gain: the body turns at d·G·Ω for a commanded Ω.
  KinematicParams kin;
  /// behavior.K follows the task convention (K > 0 builds). The firmware
  /// inequalities and turning law see firmware_K() = firmware_k_sign·K.
  BehaviorParams behavior;
  int firmware_k_sign = -1;

  int n_agents = 10;
  int n_elements = 200;
  ElementLayout layout = ElementLayout::boundary;
  int layers = 7;
  double element_radius = 0.011;
  double element_gap = 0.001;  // spacing between neighbours in the initial layout

  double agent_radius = 0.02;
  double detect_range = 0.003;
  double detect_half_angle = 15.0 * kPi / 180.0;
  bool agent_collisions = false;

  double production_diameter = 0.025;
  double k_plus = 0.1;
  double k_minus = 0.02;
  double D_c = 0.0;
  double field_h = 0.0025;

  /// Initial photormone disk at the substrate edge (layers layout).
  bool seed_photormone = false;
  double seed_diameter = 0.04;
  double seed_value = 5.0;

  /// Stop once no element inside the construction area was fetched or
  /// released for this long, counted from the first such event; ≤ 0 disables.
  double early_stop_window = 60.0;

  double firmware_K() const { return firmware_k_sign * behavior.K; }
  BehaviorParams firmware_behavior() const;
  void validate() const;
};

struct WorldState {
  std::vector<AgentState> agents;
  std::vector<BehaviorMemory> memory;
  std::vector<RngStream> rngs;
  /// Carried element id per agent, −1 when empty.
  std::vector<int> carried;
  /// Carried element offset in the carrier's body frame (forward, left).
  std::vector<Vec2> carry_offset;
  std::vector<SubstrateElement> substrate;
  PhotormoneGrid field;
  Arena arena;
  double t = 0.0;
  long tick = 0;
  /// Last time an element inside the construction area was fetched or
  /// released; negative until the first such event.
  double last_change = -1.0;
  /// Body turn rate from the wheels on the last tick (excludes in-place rotations).
  std::vector<double> turn_rate;
  std::vector<Action> last_action;

  /// FNV-1a over agents, substrate, field values and time.
  std::uint64_t hash() const;
  int carried_count() const;
};

/// Builds agents, substrate layout and field from params (seeded).
WorldState make_world(const WorldParams& p);

struct IrDetection {
  bool element = false;
  int element_id = -1;
  double gap = 0.0;  // distance from the leading edge to the element surface
  bool wall = false;
};

/// Free element within detect_range of the agent's leading edge inside the
/// forward cone; nearest one wins. Walls are flagged separately.
IrDetection ir_detect(const AgentState& s, const WorldState& w, const WorldParams& p);

/// Binds a free element to agent `a` at its current body-frame offset and
/// sets d = −1. Returns false (no change) if the element is carried or the
/// agent already carries one.
bool attach(WorldState& w, int a, int element);
/// Frees the carried element where it is. Returns false if not carrying.
bool detach(WorldState& w, int a);

/// Moves a just-released element out of free elements it overlaps by more
/// than 10% of its radius, radially to contact, and keeps it in the arena.
void settle_element(WorldState& w, int element);

struct WorldEvent {
  double t = 0.0;
  int agent = 0;
  Action action = Action::none;
  int element = -1;
};

/// One tick: sense, decide, move, wall response, photormone update.
/// Returns the non-trivial actions taken this tick.
std::vector<WorldEvent> step_world(WorldState& w, const WorldParams& p);

/// True once early-stop conditions or total_time are reached.
bool world_finished(const WorldState& w, const WorldParams& p);

/// Elements (free or carried) whose centre lies inside the construction area.
int elements_in_construction_area(const WorldState& w);

// Trace output.
void write_agent_trace_header(std::ostream& os);
void write_agent_trace(std::ostream& os, const WorldState& w);
void write_substrate_csv(std::ostream& os, const WorldState& w);
void write_events_csv(std::ostream& os, const std::vector<WorldEvent>& events, bool header);

}  // namespace rantsim
