#include "rantsim/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace rantsim {

ContinuumFields::ContinuumFields(std::size_t nx_, std::size_t ny_, double h_)
    : nx(nx_), ny(ny_), h(h_), rho_a(nx_ * ny_, 0.0), c(nx_ * ny_, 0.0), rho_s(nx_ * ny_, 0.0) {
  if (nx_ < 2 || ny_ < 2) throw ConfigError("continuum mesh: need at least 2×2 cells");
  if (!(h_ > 0.0)) throw ConfigError("continuum h: must be > 0");
}

Vec2 Orientation::at(Vec2 x) const {
  if (kind == Kind::radial_inward) {
    const Vec2 d = center - x;
    const double n = d.norm();
    return n > 1e-12 ? d * (1.0 / n) : Vec2{};
  }
  const double n = direction.norm();
  return n > 0.0 ? direction * (1.0 / n) : Vec2{};
}

void ContinuumParams::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + ": must be ≥ 0");
  };
  nonneg(C, "continuum.C");
  nonneg(V, "continuum.V");
  nonneg(k_hat, "continuum.k_hat");
  nonneg(D_c_nd, "continuum.D_c");
  nonneg(alpha_c, "continuum.alpha_c");
  nonneg(c_star, "continuum.c_star");
  nonneg(rho_a_star, "continuum.rho_a_star");
  if (!std::isfinite(K)) throw ConfigError("continuum.K: must be finite");
  if (!(rho_s_ref > 0.0)) throw ConfigError("continuum.rho_s_ref: must be > 0");
}

namespace {

double mobility(const ContinuumParams& p, double rho_s) {
  return std::max(0.0, 1.0 - rho_s / p.rho_s_ref);
}

// Self-propulsion direction component normal to each face.
struct FaceDirections {
  std::vector<double> x;  // (nx − 1)·ny faces, face (i, j) between cells i and i + 1
  std::vector<double> y;  // nx·(ny − 1) faces
};

FaceDirections face_directions(const ContinuumFields& f, const ContinuumParams& p) {
  FaceDirections d;
  const std::size_t nx = f.nx, ny = f.ny;
  const double h = f.h;
  d.x.resize((nx - 1) * ny);
  d.y.resize(nx * (ny - 1));
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i)
      d.x[j * (nx - 1) + i] = p.orientation.at({(i + 1.0) * h, (j + 0.5) * h}).x;
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      d.y[j * nx + i] = p.orientation.at({(i + 0.5) * h, (j + 1.0) * h}).y;
  return d;
}

struct FaceVelocities {
  std::vector<double> ux;
  std::vector<double> uy;
  double umax = 0.0;
};

FaceVelocities face_velocities(const ContinuumFields& f, const ContinuumParams& p,
                               const FaceDirections& dir) {
  FaceVelocities v;
  const std::size_t nx = f.nx, ny = f.ny;
  const double ih = 1.0 / f.h;
  std::vector<double> mob(nx * ny);
  for (std::size_t k = 0; k < nx * ny; ++k) mob[k] = mobility(p, f.rho_s[k]);
  auto u_of = [&](std::size_t a, std::size_t b, double d) {
    const double u = p.C * (f.c[b] - f.c[a]) * ih + p.V * 0.5 * (mob[a] + mob[b]) * d;
    v.umax = std::max(v.umax, std::abs(u));
    return u;
  };
  v.ux.resize(dir.x.size());
  v.uy.resize(dir.y.size());
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const std::size_t e = j * (nx - 1) + i;
      v.ux[e] = u_of(f.index(i, j), f.index(i + 1, j), dir.x[e]);
    }
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t e = j * nx + i;
      v.uy[e] = u_of(f.index(i, j), f.index(i, j + 1), dir.y[e]);
    }
  return v;
}

double limit_from(const ContinuumFields& f, const ContinuumParams& p, double umax) {
  double lim = f.h * f.h / (4.0 * std::max(1.0, p.D_c_nd));
  if (umax > 0.0) lim = std::min(lim, f.h / umax);
  return 0.9 * lim;
}

void apply_step(ContinuumFields& f, const ContinuumParams& p, const FaceVelocities& v, double dt) {
  const std::size_t nx = f.nx, ny = f.ny;
  const double ih = 1.0 / f.h, ih2 = ih * ih;
  std::vector<double> da(nx * ny, 0.0);  // d(rho_a)/dt

  // each face moves mass from one cell to the other; boundary faces carry nothing
  auto face = [&](std::size_t a, std::size_t b, double u) {
    const double adv = u > 0.0 ? u * f.rho_a[a] : u * f.rho_a[b];
    const double flux = adv * ih - (f.rho_a[b] - f.rho_a[a]) * ih2;
    da[a] -= flux;
    da[b] += flux;
  };
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i)
      face(f.index(i, j), f.index(i + 1, j), v.ux[j * (nx - 1) + i]);
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) face(f.index(i, j), f.index(i, j + 1), v.uy[j * nx + i]);

  std::vector<double> c_new(nx * ny), s_new(nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = f.index(i, j);
      const double cc = f.c[k];
      // no-flux: missing neighbours mirror the centre
      const double cw = i > 0 ? f.c[k - 1] : cc;
      const double ce = i + 1 < nx ? f.c[k + 1] : cc;
      const double cs = j > 0 ? f.c[k - nx] : cc;
      const double cn = j + 1 < ny ? f.c[k + nx] : cc;
      const double lap = (cw + ce + cs + cn - 4.0 * cc) * ih2;
      c_new[k] = cc + dt * (p.D_c_nd * lap + p.k_hat * f.rho_a[k] - cc);

      const double gate = (1.0 + std::tanh(p.alpha_c * (cc - p.c_star))) *
                          (1.0 + std::tanh(p.alpha_c * (f.rho_a[k] - p.rho_a_star)));
      s_new[k] = f.rho_s[k] + dt * 0.25 * p.K * f.rho_s[k] * gate;
    }

  for (std::size_t k = 0; k < nx * ny; ++k) f.rho_a[k] += dt * da[k];
  f.c.swap(c_new);
  f.rho_s.swap(s_new);

  auto check = [](std::vector<double>& x, const char* name) {
    for (double& e : x) {
      if (e < -1e-12) throw NumericalFault(std::string(name) + ": negative density after step");
      if (e < 0.0) e = 0.0;
    }
  };
  check(f.rho_a, "rho_a");
  check(f.c, "c");
  check(f.rho_s, "rho_s");
  f.t += dt;
}

}  // namespace

double cfl_limit(const ContinuumFields& f, const ContinuumParams& p) {
  return limit_from(f, p, face_velocities(f, p, face_directions(f, p)).umax);
}

void step_continuum(ContinuumFields& f, const ContinuumParams& p, double dt) {
  p.validate();
  if (!(dt > 0.0)) throw ConfigError("continuum dt: must be > 0");
  const auto v = face_velocities(f, p, face_directions(f, p));
  const double lim = limit_from(f, p, v.umax);
  if (dt > lim)
    throw ConfigError("continuum dt: " + std::to_string(dt) + " exceeds CFL limit " +
                      std::to_string(lim));
  apply_step(f, p, v, dt);
}

long advance_continuum(ContinuumFields& f, const ContinuumParams& p, double t_end, double safety,
                       const std::function<void(const ContinuumFields&)>& after_step) {
  p.validate();
  if (!(safety > 0.0 && safety <= 1.0)) throw ConfigError("continuum safety: must be in (0, 1]");
  const auto dir = face_directions(f, p);
  long steps = 0;
  while (f.t < t_end - 1e-12) {
    const auto v = face_velocities(f, p, dir);
    const double dt = std::min(safety * limit_from(f, p, v.umax), t_end - f.t);
    apply_step(f, p, v, dt);
    ++steps;
    if (after_step) after_step(f);
  }
  return steps;
}

ContinuumPreset load_preset(const std::string& name, double h) {
  if (name != "construction" && name != "deconstruction")
    throw ConfigError("preset: unknown name '" + name + "' (construction|deconstruction)");
  if (!(h > 0.0 && h <= 0.1)) throw ConfigError("preset h: must be in (0, 0.1]");
  const double W = 8.0, H = 6.0;
  const auto nx = static_cast<std::size_t>(std::lround(W / h));
  const auto ny = static_cast<std::size_t>(std::lround(H / h));

  ContinuumPreset out;
  out.fields = ContinuumFields(nx, ny, W / static_cast<double>(nx));
  if (name == "deconstruction") out.k_s = -2.5;
  out.length_scale = std::sqrt(out.D_c / out.k_minus);
  const double l = out.length_scale;

  auto& f = out.fields;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const Vec2 x = f.cell_center(i, j);
      const std::size_t k = f.index(i, j);
      if (name == "construction") {
        const double r = (x - Vec2{5.0, 4.0}).norm();
        f.rho_a[k] = (r >= 1.0 && r < 1.3) ? 1.0 : 0.0;
        f.rho_s[k] = r < 0.5 ? 1.0 : 0.0;
      } else {
        const Vec2 d = x - Vec2{4.0, 3.5};
        f.rho_a[k] = std::exp(-d.norm2() / (2.0 * 0.25));
        f.rho_s[k] = x.y > 4.0 ? 1.0 : 0.0;
      }
    }

  // reference scales: ρ_o = max initial ρ_a, c_o = k₊ρ_o/k₋
  const double rho_o = *std::max_element(f.rho_a.begin(), f.rho_a.end());
  for (double& v : f.rho_a) v /= rho_o;
  const double c_o = out.k_plus * rho_o / out.k_minus;

  auto& p = out.params;
  p.C = out.chi * c_o / out.D_a;
  p.K = out.k_s * l / out.v_o;
  p.V = out.v_o * l / out.D_a;
  p.k_hat = out.k_plus * rho_o / (out.k_minus * c_o);
  p.D_c_nd = out.D_c / (l * l * out.k_minus);
  p.rho_a_star = 0.3;
  p.c_star = 0.01;
  if (name == "construction") {
    p.orientation.kind = Orientation::Kind::radial_inward;
    p.orientation.center = {5.0, 4.0};
  } else {
    p.orientation.kind = Orientation::Kind::uniform;
    p.orientation.direction = {0.0, 1.0};
  }
  return out;
}

MassReport mass_report(const ContinuumFields& f) {
  const double a = f.h * f.h;
  return {a * std::accumulate(f.rho_a.begin(), f.rho_a.end(), 0.0),
          a * std::accumulate(f.c.begin(), f.c.end(), 0.0),
          a * std::accumulate(f.rho_s.begin(), f.rho_s.end(), 0.0)};
}

std::vector<double> coarsen2(const std::vector<double>& fine, std::size_t nx, std::size_t ny) {
  if (nx % 2 || ny % 2) throw ConfigError("coarsen2: mesh dimensions must be even");
  if (fine.size() != nx * ny) throw ConfigError("coarsen2: size mismatch");
  std::vector<double> out((nx / 2) * (ny / 2));
  for (std::size_t j = 0; j < ny / 2; ++j)
    for (std::size_t i = 0; i < nx / 2; ++i) {
      const std::size_t k = 2 * j * nx + 2 * i;
      out[j * (nx / 2) + i] = 0.25 * (fine[k] + fine[k + 1] + fine[k + nx] + fine[k + nx + 1]);
    }
  return out;
}

}  // namespace rantsim
