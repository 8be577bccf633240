#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rantsim/core.hpp"
#include "rantsim/world.hpp"

namespace rantsim {

struct ClusterReport {
  int n_c = 0;
  std::vector<double> areas;    // A_i (m²), one per cluster
  std::vector<int> labels;      // cluster index per input element
  double A_m = 0.0;             // largest cluster area
  double covered_fraction = 0;  // A_e / A_o
  double mean_relative_area = 0;  // ā = Σ A_i / (n_c A_o)
};

/// Connected components of the relation |x_i − x_j| < delta (union-find).
/// Areas are Monte Carlo estimates of each cluster's disk union clipped to
/// `area`; A_o = area.area(). `samples` is the total budget per report.
ClusterReport cluster_elements(std::span<const Vec2> centers, double element_radius, double delta,
                               const Rect& area, std::uint64_t seed = 1, int samples = 100000);

/// Union-find labels only (no areas).
std::vector<int> cluster_labels(std::span<const Vec2> centers, double delta);

struct EllipseReport {
  double lambda_a = 0.0;  // larger eigenvalue (m²)
  double lambda_b = 0.0;
  double circumference = 0.0;  // semi-axes √λ, Ramanujan's approximation
};

/// Sample covariance (n − 1) of the points; nullopt for fewer than 2.
std::optional<EllipseReport> covariance_ellipse(std::span<const Vec2> pts);

/// π[3(a + b) − √((3a + b)(a + 3b))].
double ramanujan_circumference(double a, double b);

struct CurvatureReport {
  double mean = 0.0;        // κ̄ (1/m)
  double normalized = 0.0;  // κ̄ / κ*
  long samples = 0;
};

/// κ = |Δθ|/(v_o dt) per step of each track, skipping steps with speed
/// below 0.1·v_o; averaged over all tracks and steps. κ* = 1/r_star (m).
CurvatureReport trajectory_curvature(std::span<const std::vector<Vec2>> pos,
                                     std::span<const std::vector<double>> theta, double dt,
                                     double v_o, double r_star);

/// Mean over unordered pairs; nullopt for fewer than 2. With box > 0 the
/// minimum-image distance on a square torus of that side is used.
std::optional<double> mean_pairwise_distance(std::span<const Vec2> pts, double box = 0.0);

/// Centres of free elements inside the construction area.
std::vector<Vec2> structure_elements(const WorldState& w);

struct MetricsRow {
  double t = 0.0;
  int n_c = 0;
  double covered_fraction = 0.0;
  double mean_relative_area = 0.0;
  double largest_fraction = 0.0;  // A_m / A_o
  double lambda_a = 0.0;
  double lambda_b = 0.0;
  double circumference = 0.0;
  double curvature_ratio = 0.0;  // κ̄/κ*
  double mean_distance = 0.0;
  int elements_in_area = 0;
};

/// Snapshot metrics of a world; `curvature_ratio` is supplied by the caller.
MetricsRow snapshot_metrics(const WorldState& w, double delta, double curvature_ratio,
                            std::uint64_t seed);

void write_metrics_header(std::ostream& os);
void write_metrics_row(std::ostream& os, const MetricsRow& row);

}  // namespace rantsim
