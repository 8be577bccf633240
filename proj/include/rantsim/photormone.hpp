#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rantsim/core.hpp"

namespace rantsim {

enum class FootprintProfile { disk, gaussian };

const char* to_string(FootprintProfile p);
FootprintProfile footprint_from_string(const std::string& s);

/// Region over which one agent produces photormone. Disk: indicator of
/// |x − center| ≤ radius. Gaussian: exp(−|x − center|² / (2 radius²)).
struct SourceFootprint {
  Vec2 center;
  double radius = 0.0125;
  FootprintProfile profile = FootprintProfile::disk;
  double weight = 1.0;
};

/// What a sample outside the gridded rectangle returns (walls mode only).
enum class OutsidePolicy { clamp, zero };

/// Cell-centred scalar field c(x, t). Cell (i, j) has centre
/// origin + ((i + ½)h, (j + ½)h) and is stored at j·nx + i.
class PhotormoneGrid {
 public:
  PhotormoneGrid() = default;
  PhotormoneGrid(std::size_t nx, std::size_t ny, double h, Vec2 origin = {});

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double h() const { return h_; }
  Vec2 origin() const { return origin_; }
  double width() const { return static_cast<double>(nx_) * h_; }
  double height() const { return static_cast<double>(ny_) * h_; }
  Vec2 cell_center(std::size_t i, std::size_t j) const;
  bool contains(Vec2 p) const;

  double& at(std::size_t i, std::size_t j) { return values_[j * nx_ + i]; }
  double at(std::size_t i, std::size_t j) const { return values_[j * nx_ + i]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  void fill(double v);

  /// Σ c · h².
  double total() const;
  double max_value() const;

  double k_plus = 0.1;    // c·s⁻¹
  double k_minus = 0.02;  // s⁻¹
  double D_c = 0.0;       // m²·s⁻¹
  double w = 0.0125;      // production footprint radius (m)
  BoundaryMode boundary = BoundaryMode::walls;
  OutsidePolicy outside = OutsidePolicy::clamp;
  double t = 0.0;

 private:
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  double h_ = 0.0;
  Vec2 origin_;
  std::vector<double> values_;
};

/// Adds each footprint (times weight) into a density raster with the grid's
/// layout. Disk footprints use cell-centre membership; periodic grids wrap.
void rasterize_sources(const PhotormoneGrid& grid, std::span<const SourceFootprint> sources,
                       std::span<double> density);

/// One production/decay (+ optional diffusion) step with a given source
/// density ρ_a per cell. Production/decay is the exact exponential relaxation
/// c ← k̂ + (c − k̂)e^{−k₋dt}, k̂ = k₊ρ_a/k₋; diffusion is an explicit 5-point
/// step applied afterwards (periodic or no-flux by grid boundary mode).
void step_field_density(PhotormoneGrid& grid, std::span<const double> density, double dt);

/// step_field_density with the density rasterized from footprints.
void step_field(PhotormoneGrid& grid, std::span<const SourceFootprint> sources, double dt);

/// Throws ConfigError when dt·k₋ ≥ 1 or, with diffusion, dt·D_c/h² > ¼.
void check_field_stability(const PhotormoneGrid& grid, double dt);

/// Bilinear interpolation of the four surrounding cell centres.
double sample_bilinear(const PhotormoneGrid& grid, Vec2 p);

struct SensorReading {
  double left = 0.0;
  double right = 0.0;
};

/// Samples at r ± (l_s/2)n̂, n̂ = (−sin θ, cos θ); left is the + side.
SensorReading sensor_pair_read(const PhotormoneGrid& grid, Vec2 r, double theta, double l_s);

/// Field of a constant point source of strength α at the origin, switched on
/// at t = 0, in nondimensional units (decay rate 1):
///   c = α k̂ ∫₀ᵗ e^{−s}/(4π D s) · exp(−|x|²/(4 D s)) ds.
/// Adaptive Gauss–Kronrod quadrature to 1e-6 relative. Throws for |x| = 0.
double greens_oracle(Vec2 x, double t, double alpha, double D_c, double k_hat);

// Snapshot format: see docs/formats.md.
void write_snapshot_binary(std::ostream& os, const PhotormoneGrid& grid);
void write_snapshot_csv(std::ostream& os, const PhotormoneGrid& grid);
PhotormoneGrid read_snapshot_binary(std::istream& is);

/// Snapshot of an arbitrary cell-centred scalar field in the same formats.
struct FieldView {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double h = 0.0;
  double t = 0.0;
  Vec2 origin;
  std::span<const double> values;
};
void write_snapshot_binary(std::ostream& os, const FieldView& f);
void write_snapshot_csv(std::ostream& os, const FieldView& f);

}  // namespace rantsim
