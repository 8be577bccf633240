#include "rantsim/photormone.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rantsim {

const char* to_string(FootprintProfile p) {
  return p == FootprintProfile::disk ? "disk" : "gaussian";
}

FootprintProfile footprint_from_string(const std::string& s) {
  if (s == "disk") return FootprintProfile::disk;
  if (s == "gaussian") return FootprintProfile::gaussian;
  throw ConfigError("footprint: expected 'disk' or 'gaussian', got '" + s + "'");
}

PhotormoneGrid::PhotormoneGrid(std::size_t nx, std::size_t ny, double h, Vec2 origin)
    : nx_(nx), ny_(ny), h_(h), origin_(origin), values_(nx * ny, 0.0) {
  if (nx == 0 || ny == 0) throw ConfigError("grid: nx and ny must be positive");
  if (!(h > 0.0)) throw ConfigError("grid: h must be > 0");
}

Vec2 PhotormoneGrid::cell_center(std::size_t i, std::size_t j) const {
  return {origin_.x + (static_cast<double>(i) + 0.5) * h_,
          origin_.y + (static_cast<double>(j) + 0.5) * h_};
}

bool PhotormoneGrid::contains(Vec2 p) const {
  return p.x >= origin_.x && p.y >= origin_.y && p.x < origin_.x + width() &&
         p.y < origin_.y + height();
}

void PhotormoneGrid::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

double PhotormoneGrid::total() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * h_ * h_;
}

double PhotormoneGrid::max_value() const {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

namespace {

long floor_index(double u) { return static_cast<long>(std::floor(u)); }

long wrap_index(long i, long n) {
  i %= n;
  return i < 0 ? i + n : i;
}

}  // namespace

void rasterize_sources(const PhotormoneGrid& grid, std::span<const SourceFootprint> sources,
                       std::span<double> density) {
  const long nx = static_cast<long>(grid.nx());
  const long ny = static_cast<long>(grid.ny());
  const double h = grid.h();
  const bool periodic = grid.boundary == BoundaryMode::periodic;
  for (const auto& s : sources) {
    if (!(s.radius > 0.0)) throw ConfigError("footprint.radius: must be > 0");
    const double reach = s.profile == FootprintProfile::disk ? s.radius : 4.0 * s.radius;
    const double inv2r2 = 1.0 / (2.0 * s.radius * s.radius);
    const double r2 = s.radius * s.radius;
    const double ux = (s.center.x - grid.origin().x) / h - 0.5;
    const double uy = (s.center.y - grid.origin().y) / h - 0.5;
    long i0 = floor_index(ux - reach / h);
    long i1 = floor_index(ux + reach / h) + 1;
    long j0 = floor_index(uy - reach / h);
    long j1 = floor_index(uy + reach / h) + 1;
    if (!periodic) {
      i0 = std::max(i0, 0L);
      j0 = std::max(j0, 0L);
      i1 = std::min(i1, nx - 1);
      j1 = std::min(j1, ny - 1);
    } else {
      // a footprint wider than the box would wrap onto itself
      i1 = std::min(i1, i0 + nx - 1);
      j1 = std::min(j1, j0 + ny - 1);
    }
    for (long j = j0; j <= j1; ++j) {
      const double dy = (static_cast<double>(j) - uy) * h;
      const long jj = periodic ? wrap_index(j, ny) : j;
      for (long i = i0; i <= i1; ++i) {
        const double dx = (static_cast<double>(i) - ux) * h;
        const double d2 = dx * dx + dy * dy;
        double v;
        if (s.profile == FootprintProfile::disk) {
          if (d2 > r2) continue;
          v = 1.0;
        } else {
          if (d2 > reach * reach) continue;
          v = std::exp(-d2 * inv2r2);
        }
        const long ii = periodic ? wrap_index(i, nx) : i;
        density[static_cast<std::size_t>(jj * nx + ii)] += s.weight * v;
      }
    }
  }
}

void check_field_stability(const PhotormoneGrid& grid, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt: must be > 0");
  if (!(grid.k_minus > 0.0)) throw ConfigError("photormone.k_minus: must be > 0");
  if (grid.k_plus < 0.0) throw ConfigError("photormone.k_plus: must be >= 0");
  if (dt * grid.k_minus >= 1.0) throw ConfigError("dt: dt*k_minus must be < 1");
  if (grid.D_c < 0.0) throw ConfigError("photormone.D_c: must be >= 0");
  if (grid.D_c > 0.0 && dt * grid.D_c / (grid.h() * grid.h()) > 0.25)
    throw ConfigError("dt: diffusion stability requires dt*D_c/h^2 <= 0.25");
}

namespace {

void diffuse(PhotormoneGrid& grid, double dt, std::vector<double>& scratch) {
  const std::size_t nx = grid.nx(), ny = grid.ny();
  const double lam = dt * grid.D_c / (grid.h() * grid.h());
  auto c = grid.values();
  scratch.assign(c.begin(), c.end());
  const bool periodic = grid.boundary == BoundaryMode::periodic;
  for (std::size_t j = 0; j < ny; ++j) {
    const std::size_t jm = j == 0 ? (periodic ? ny - 1 : 0) : j - 1;
    const std::size_t jp = j + 1 == ny ? (periodic ? 0 : ny - 1) : j + 1;
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t im = i == 0 ? (periodic ? nx - 1 : 0) : i - 1;
      const std::size_t ip = i + 1 == nx ? (periodic ? 0 : nx - 1) : i + 1;
      const double centre = scratch[j * nx + i];
      // mirrored ghost cells give zero flux on walls
      const double lap = scratch[j * nx + im] + scratch[j * nx + ip] + scratch[jm * nx + i] +
                         scratch[jp * nx + i] - 4.0 * centre;
      c[j * nx + i] = centre + lam * lap;
    }
  }
}

}  // namespace

void step_field_density(PhotormoneGrid& grid, std::span<const double> density, double dt) {
  check_field_stability(grid, dt);
  auto c = grid.values();
  const double decay = std::exp(-grid.k_minus * dt);
  const double gain = (1.0 - decay) * grid.k_plus / grid.k_minus;
  if (density.empty()) {
    for (double& v : c) v *= decay;
  } else {
    if (density.size() != c.size()) throw ConfigError("density: size mismatch with grid");
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = c[k] * decay + gain * density[k];
  }
  if (grid.D_c > 0.0) {
    static thread_local std::vector<double> scratch;
    diffuse(grid, dt, scratch);
  }
  grid.t += dt;
}

void step_field(PhotormoneGrid& grid, std::span<const SourceFootprint> sources, double dt) {
  if (sources.empty()) {
    step_field_density(grid, {}, dt);
    return;
  }
  static thread_local std::vector<double> density;
  density.assign(grid.nx() * grid.ny(), 0.0);
  rasterize_sources(grid, sources, density);
  step_field_density(grid, density, dt);
}

double sample_bilinear(const PhotormoneGrid& grid, Vec2 p) {
  const long nx = static_cast<long>(grid.nx());
  const long ny = static_cast<long>(grid.ny());
  if (grid.boundary == BoundaryMode::walls && grid.outside == OutsidePolicy::zero &&
      !grid.contains(p))
    return 0.0;
  const double ux = (p.x - grid.origin().x) / grid.h() - 0.5;
  const double uy = (p.y - grid.origin().y) / grid.h() - 0.5;
  const long i0 = floor_index(ux);
  const long j0 = floor_index(uy);
  const double fx = ux - static_cast<double>(i0);
  const double fy = uy - static_cast<double>(j0);
  auto idx = [&](long i, long n) {
    if (grid.boundary == BoundaryMode::periodic) return wrap_index(i, n);
    return std::clamp(i, 0L, n - 1);
  };
  const long ia = idx(i0, nx), ib = idx(i0 + 1, nx);
  const long ja = idx(j0, ny), jb = idx(j0 + 1, ny);
  auto v = grid.values();
  const double c00 = v[static_cast<std::size_t>(ja * nx + ia)];
  const double c10 = v[static_cast<std::size_t>(ja * nx + ib)];
  const double c01 = v[static_cast<std::size_t>(jb * nx + ia)];
  const double c11 = v[static_cast<std::size_t>(jb * nx + ib)];
  return (1.0 - fy) * ((1.0 - fx) * c00 + fx * c10) + fy * ((1.0 - fx) * c01 + fx * c11);
}

SensorReading sensor_pair_read(const PhotormoneGrid& grid, Vec2 r, double theta, double l_s) {
  if (!(l_s > 0.0)) throw ConfigError("l_s: must be > 0");
  const Vec2 off = left_normal(theta) * (0.5 * l_s);
  return {sample_bilinear(grid, r + off), sample_bilinear(grid, r - off)};
}

double greens_oracle(Vec2 x, double t, double alpha, double D_c, double k_hat) {
  if (!(t > 0.0)) throw ConfigError("t: must be > 0");
  if (!(D_c > 0.0)) throw ConfigError("D_c: must be > 0");
  const double r2 = x.norm2();
  if (r2 == 0.0) throw ConfigError("x: Green's function is singular at the source");
  if (alpha == 0.0) return 0.0;
  auto integrand = [&](double s) {
    if (s <= 0.0) return 0.0;
    return std::exp(-s - r2 / (4.0 * D_c * s)) / (4.0 * kPi * D_c * s);
  };
  // the integrand is negligible until s ~ r²/(4D)·(1/40); split there so the
  // adaptive rule resolves the sharp rise
  const double s_peak = std::min(t, r2 / (4.0 * D_c));
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err = 0.0;
  double total = GK::integrate(integrand, 0.0, s_peak, 20, 1e-10, &err);
  if (t > s_peak) total += GK::integrate(integrand, s_peak, t, 20, 1e-10, &err);
  return alpha * k_hat * total;
}

// ---------------------------------------------------------------------------
// Snapshots

namespace {

constexpr char kMagic[4] = {'R', 'S', 'N', 'P'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "snapshot writer assumes little-endian");
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("snapshot: truncated input");
  return v;
}

}  // namespace

void write_snapshot_binary(std::ostream& os, const FieldView& f) {
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.nx));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.ny));
  put<double>(os, f.h);
  put<double>(os, f.t);
  put<double>(os, f.origin.x);
  put<double>(os, f.origin.y);
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(double)));
}

void write_snapshot_csv(std::ostream& os, const FieldView& f) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", f.h);
  os << "# nx=" << f.nx << " ny=" << f.ny << " h=" << buf;
  std::snprintf(buf, sizeof buf, "%.17g", f.t);
  os << " t=" << buf;
  std::snprintf(buf, sizeof buf, " x0=%.17g y0=%.17g", f.origin.x, f.origin.y);
  os << buf << '\n';
  for (std::size_t j = 0; j < f.ny; ++j) {
    for (std::size_t i = 0; i < f.nx; ++i) {
      std::snprintf(buf, sizeof buf, "%.9g", f.values[j * f.nx + i]);
      if (i) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

namespace {
FieldView view_of(const PhotormoneGrid& g) {
  return {g.nx(), g.ny(), g.h(), g.t, g.origin(), g.values()};
}
}  // namespace

void write_snapshot_binary(std::ostream& os, const PhotormoneGrid& grid) {
  write_snapshot_binary(os, view_of(grid));
}

void write_snapshot_csv(std::ostream& os, const PhotormoneGrid& grid) {
  write_snapshot_csv(os, view_of(grid));
}

PhotormoneGrid read_snapshot_binary(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("snapshot: bad magic");
  if (get<std::uint32_t>(is) != kVersion) throw std::runtime_error("snapshot: unsupported version");
  const auto nx = get<std::uint32_t>(is);
  const auto ny = get<std::uint32_t>(is);
  const double h = get<double>(is);
  const double t = get<double>(is);
  const double x0 = get<double>(is);
  const double y0 = get<double>(is);
  PhotormoneGrid g(nx, ny, h, {x0, y0});
  g.t = t;
  auto v = g.values();
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) throw std::runtime_error("snapshot: truncated values");
  return g;
}

}  // namespace rantsim
