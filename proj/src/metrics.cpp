#include "rantsim/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace rantsim {

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<int> cluster_labels(std::span<const Vec2> centers, double delta) {
  if (!(delta > 0.0)) throw ConfigError("delta: must be > 0");
  const std::size_t n = centers.size();
  DisjointSets ds(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if ((centers[i] - centers[j]).norm() < delta) ds.unite(int(i), int(j));
  // relabel roots 0..n_c−1 in order of first appearance
  std::vector<int> label(n, -1), root_label(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int r = ds.find(int(i));
    if (root_label[r] < 0) root_label[r] = next++;
    label[i] = root_label[r];
  }
  return label;
}

ClusterReport cluster_elements(std::span<const Vec2> centers, double element_radius, double delta,
                               const Rect& area, std::uint64_t seed, int samples) {
  if (!(element_radius > 0.0)) throw ConfigError("element_radius: must be > 0");
  ClusterReport rep;
  rep.labels = cluster_labels(centers, delta);
  rep.n_c = rep.labels.empty() ? 0 : *std::max_element(rep.labels.begin(), rep.labels.end()) + 1;
  rep.areas.assign(static_cast<std::size_t>(rep.n_c), 0.0);
  if (rep.n_c == 0) return rep;

  // bounding boxes clipped to the area
  std::vector<Rect> box(rep.areas.size(),
                        Rect{area.x1, area.y1, area.x0, area.y0});
  std::vector<std::vector<Vec2>> members(rep.areas.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    auto& b = box[static_cast<std::size_t>(rep.labels[i])];
    const Vec2 c = centers[i];
    b.x0 = std::min(b.x0, c.x - element_radius);
    b.y0 = std::min(b.y0, c.y - element_radius);
    b.x1 = std::max(b.x1, c.x + element_radius);
    b.y1 = std::max(b.y1, c.y + element_radius);
    members[static_cast<std::size_t>(rep.labels[i])].push_back(c);
  }
  double total_box = 0.0;
  for (auto& b : box) {
    b = {std::max(b.x0, area.x0), std::max(b.y0, area.y0), std::min(b.x1, area.x1),
         std::min(b.y1, area.y1)};
    total_box += std::max(b.width(), 0.0) * std::max(b.height(), 0.0);
  }

  RngStream rng(seed, 0x4d43);
  const double r2 = element_radius * element_radius;
  for (std::size_t k = 0; k < box.size(); ++k) {
    const auto& b = box[k];
    const double ba = std::max(b.width(), 0.0) * std::max(b.height(), 0.0);
    if (ba <= 0.0) continue;
    const int n = std::max(2000, static_cast<int>(samples * ba / total_box));
    int hit = 0;
    for (int s = 0; s < n; ++s) {
      const Vec2 q{rng.uniform(b.x0, b.x1), rng.uniform(b.y0, b.y1)};
      for (const auto& c : members[k])
        if ((q - c).norm2() <= r2) {
          ++hit;
          break;
        }
    }
    rep.areas[k] = ba * hit / n;
  }
  const double A_o = area.area();
  const double A_e = std::accumulate(rep.areas.begin(), rep.areas.end(), 0.0);
  rep.A_m = *std::max_element(rep.areas.begin(), rep.areas.end());
  rep.covered_fraction = std::clamp(A_e / A_o, 0.0, 1.0);
  rep.mean_relative_area = A_e / (rep.n_c * A_o);
  return rep;
}

double ramanujan_circumference(double a, double b) {
  return kPi * (3.0 * (a + b) - std::sqrt((3.0 * a + b) * (a + 3.0 * b)));
}

std::optional<EllipseReport> covariance_ellipse(std::span<const Vec2> pts) {
  if (pts.size() < 2) return std::nullopt;
  Vec2 mean;
  for (const auto& p : pts) mean += p;
  mean *= 1.0 / static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : pts) {
    const Eigen::Vector2d d(p.x - mean.x, p.y - mean.y);
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(pts.size() - 1);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov, Eigen::EigenvaluesOnly);
  EllipseReport r;
  r.lambda_a = std::max(es.eigenvalues()(1), 0.0);
  r.lambda_b = std::max(es.eigenvalues()(0), 0.0);
  r.circumference = ramanujan_circumference(std::sqrt(r.lambda_a), std::sqrt(r.lambda_b));
  return r;
}

CurvatureReport trajectory_curvature(std::span<const std::vector<Vec2>> pos,
                                     std::span<const std::vector<double>> theta, double dt,
                                     double v_o, double r_star) {
  if (pos.size() != theta.size()) throw ConfigError("theta: one heading track per position track");
  if (!(dt > 0.0 && v_o > 0.0)) throw ConfigError("dt, v_o: must be > 0");
  CurvatureReport rep;
  double sum = 0.0;
  for (std::size_t a = 0; a < pos.size(); ++a) {
    const auto& p = pos[a];
    const auto& th = theta[a];
    const std::size_t n = std::min(p.size(), th.size());
    for (std::size_t i = 1; i < n; ++i) {
      if ((p[i] - p[i - 1]).norm() / dt < 0.1 * v_o) continue;
      sum += std::abs(wrap_angle(th[i] - th[i - 1])) / (v_o * dt);
      ++rep.samples;
    }
  }
  if (rep.samples > 0) rep.mean = sum / static_cast<double>(rep.samples);
  if (r_star > 0.0) rep.normalized = rep.mean * r_star;
  return rep;
}

std::optional<double> mean_pairwise_distance(std::span<const Vec2> pts, double box) {
  if (pts.size() < 2) return std::nullopt;
  double sum = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Vec2 d = box > 0.0 ? periodic_delta(pts[i], pts[j], box, box) : pts[j] - pts[i];
      sum += d.norm();
      ++pairs;
    }
  return sum / static_cast<double>(pairs);
}

std::vector<Vec2> structure_elements(const WorldState& w) {
  const Rect area = w.arena.construction_area();
  std::vector<Vec2> out;
  for (const auto& e : w.substrate)
    if (e.free() && area.contains(e.pos)) out.push_back(e.pos);
  return out;
}

MetricsRow snapshot_metrics(const WorldState& w, double delta, double curvature_ratio,
                            std::uint64_t seed) {
  MetricsRow row;
  row.t = w.t;
  const Rect area = w.arena.construction_area();
  const auto pts = structure_elements(w);
  row.elements_in_area = static_cast<int>(pts.size());
  const double er = w.substrate.empty() ? 0.011 : w.substrate.front().radius;
  const auto cl = cluster_elements(pts, er, delta, area, seed);
  row.n_c = cl.n_c;
  row.covered_fraction = cl.covered_fraction;
  row.mean_relative_area = cl.mean_relative_area;
  row.largest_fraction = cl.A_m / area.area();
  if (const auto el = covariance_ellipse(pts)) {
    row.lambda_a = el->lambda_a;
    row.lambda_b = el->lambda_b;
    row.circumference = el->circumference;
  }
  row.curvature_ratio = curvature_ratio;
  std::vector<Vec2> agents;
  for (const auto& a : w.agents) agents.push_back(a.r);
  row.mean_distance = mean_pairwise_distance(agents).value_or(0.0);
  return row;
}

void write_metrics_header(std::ostream& os) {
  os << "t,n_c,covered_fraction,mean_relative_area,largest_fraction,lambda_a,lambda_b,"
        "circumference,curvature_ratio,mean_distance,elements_in_area\n";
}

void write_metrics_row(std::ostream& os, const MetricsRow& r) {
  char buf[320];
  std::snprintf(buf, sizeof buf, "%.4f,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%d\n", r.t, r.n_c,
                r.covered_fraction, r.mean_relative_area, r.largest_fraction, r.lambda_a,
                r.lambda_b, r.circumference, r.curvature_ratio, r.mean_distance,
                r.elements_in_area);
  os << buf;
}

}  // namespace rantsim
