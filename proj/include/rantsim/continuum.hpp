#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rantsim/core.hpp"
#include "rantsim/photormone.hpp"

namespace rantsim {

/// Raised when an explicit step drives a density below −1e-12.
class NumericalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cell-centred fields on an nx×ny mesh of spacing h, origin at (0, 0).
/// Cell (i, j) has centre ((i + ½)h, (j + ½)h) and is stored at j·nx + i.
struct ContinuumFields {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double h = 0.0;
  double t = 0.0;
  std::vector<double> rho_a;
  std::vector<double> c;
  std::vector<double> rho_s;

  ContinuumFields() = default;
  ContinuumFields(std::size_t nx, std::size_t ny, double h);
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
  Vec2 cell_center(std::size_t i, std::size_t j) const {
    return {(static_cast<double>(i) + 0.5) * h, (static_cast<double>(j) + 0.5) * h};
  }
  double width() const { return static_cast<double>(nx) * h; }
  double height() const { return static_cast<double>(ny) * h; }

  FieldView view_rho_a() const { return {nx, ny, h, t, {}, rho_a}; }
  FieldView view_c() const { return {nx, ny, h, t, {}, c}; }
  FieldView view_rho_s() const { return {nx, ny, h, t, {}, rho_s}; }
};

/// Static direction of self-propulsion. radial_inward points at `center`
/// (zero there); uniform uses `direction` as given (normalized on use).
struct Orientation {
  enum class Kind { radial_inward, uniform };
  Kind kind = Kind::uniform;
  Vec2 center;
  Vec2 direction{0.0, 1.0};

  Vec2 at(Vec2 x) const;
};

struct ContinuumParams {
  double C = 1.0;        // phototaxis / diffusion
  double K = 0.0;        // deposition rate, signed
  double V = 1.0;        // advection / diffusion
  double k_hat = 1.0;    // production / decay
  double D_c_nd = 1.0;   // photormone diffusivity
  double alpha_c = 100.0;
  double c_star = 0.01;
  double rho_a_star = 0.3;
  /// Substrate density at which self-propulsion stops: speed ∝ (1 − ρ_s/rho_s_ref)₊.
  double rho_s_ref = 1.0;
  Orientation orientation;

  void validate() const;
};

/// 0.9·min(h²/(4·max(1, D_c_nd)), h/max|u|), with u evaluated on cell faces.
double cfl_limit(const ContinuumFields& f, const ContinuumParams& p);

/// One explicit Euler step of all three fields from the same old state.
/// ρ_a: conservative first-order upwind flux for u = C∇c + V(1 − ρ_s/ρ_ref)₊p̂
/// plus central diffusion; c: D∇²c + k̂ρ_a − c; ρ_s: thresholded growth.
/// No flux through the outer boundary for ρ_a and c.
/// Throws ConfigError when dt exceeds cfl_limit, NumericalFault when a
/// density drops below −1e-12 (small negatives are clipped to 0).
void step_continuum(ContinuumFields& f, const ContinuumParams& p, double dt);

/// Steps until t_end with dt = safety·cfl_limit each step (last step shortened).
/// Returns the number of steps; `after_step` runs after each one.
long advance_continuum(ContinuumFields& f, const ContinuumParams& p, double t_end,
                       double safety = 0.5,
                       const std::function<void(const ContinuumFields&)>& after_step = {});

struct ContinuumPreset {
  ContinuumFields fields;
  ContinuumParams params;
  /// Dimensional inputs the groups were built from.
  double v_o = 0.1, chi = 0.005, D_a = 0.005, k_plus = 1.5, k_minus = 1.5, D_c = 0.005,
         k_s = 2.5;
  double length_scale = 0.0;  // l = √(D_c/k₋)
};

/// "construction" or "deconstruction" on an 8×6 domain with mesh h ≤ 0.1.
ContinuumPreset load_preset(const std::string& name, double h = 0.1);

struct MassReport {
  double rho_a = 0.0;
  double c = 0.0;
  double rho_s = 0.0;
};

/// h²-weighted sums.
MassReport mass_report(const ContinuumFields& f);

/// Average of each 2×2 block; nx, ny must be even.
std::vector<double> coarsen2(const std::vector<double>& fine, std::size_t nx, std::size_t ny);

}  // namespace rantsim
