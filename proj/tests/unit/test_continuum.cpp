#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "rantsim/continuum.hpp"

using namespace rantsim;

namespace {
ContinuumParams quiet() {
  ContinuumParams p;
  p.C = 0.0;
  p.V = 0.0;
  p.K = 0.0;
  return p;
}

Vec2 centroid(const ContinuumFields& f) {
  double m = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) {
      const double v = f.rho_a[f.index(i, j)];
      const Vec2 x = f.cell_center(i, j);
      m += v;
      sx += v * x.x;
      sy += v * x.y;
    }
  return {sx / m, sy / m};
}
}  // namespace

TEST_CASE("mesh and parameter validation") {
  CHECK_THROWS_AS(ContinuumFields(1, 5, 0.1), ConfigError);
  CHECK_THROWS_AS(ContinuumFields(4, 4, 0.0), ConfigError);
  ContinuumParams p;
  p.rho_s_ref = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ContinuumParams{};
  p.C = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("photormone relaxes without agents") {
  ContinuumFields f(10, 8, 0.1);
  std::fill(f.c.begin(), f.c.end(), 1.0);
  const auto p = quiet();
  const double dt = 1e-3;
  for (int n = 0; n < 200; ++n) step_continuum(f, p, dt);
  const double expect = std::pow(1.0 - dt, 200);
  for (double v : f.c) CHECK(v == doctest::Approx(expect).epsilon(1e-13));
  CHECK(f.t == doctest::Approx(0.2));
}

TEST_CASE("constant agent density drives photormone to k_hat·rho_a") {
  ContinuumFields f(6, 6, 0.1);
  std::fill(f.rho_a.begin(), f.rho_a.end(), 0.7);
  auto p = quiet();
  p.k_hat = 2.0;
  advance_continuum(f, p, 30.0);
  for (double v : f.c) CHECK(v == doctest::Approx(1.4).epsilon(1e-9));
  for (double v : f.rho_a) CHECK(v == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("substrate grows at rate K where both gates are open") {
  ContinuumFields f(4, 4, 0.1);
  std::fill(f.rho_a.begin(), f.rho_a.end(), 1.0);
  std::fill(f.c.begin(), f.c.end(), 1.0);
  std::fill(f.rho_s.begin(), f.rho_s.end(), 0.1);
  auto p = quiet();
  p.K = 1.5;
  const double dt = 1e-4;
  const int n = 5000;
  for (int s = 0; s < n; ++s) step_continuum(f, p, dt);
  // both tanh factors are 1 to double precision; the c gate stays open as c relaxes to k̂ρ_a = 1
  const double discrete = 0.1 * std::pow(1.0 + 1.5 * dt, n);
  for (double v : f.rho_s) {
    CHECK(v == doctest::Approx(discrete).epsilon(1e-10));
    CHECK(v == doctest::Approx(0.1 * std::exp(1.5 * 0.5)).epsilon(1e-3));
  }

  // closed gate: no agents → no change
  ContinuumFields g(4, 4, 0.1);
  std::fill(g.rho_s.begin(), g.rho_s.end(), 0.3);
  for (int s = 0; s < 100; ++s) step_continuum(g, p, dt);
  for (double v : g.rho_s) CHECK(v == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("agent mass is conserved") {
  ContinuumFields f(30, 20, 0.05);
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& v : f.rho_a) v = u(gen);
  for (auto& v : f.rho_s) v = 0.5 * u(gen);
  ContinuumParams p;
  p.C = 1.0;
  p.V = 1.2;
  p.K = 1.0;
  p.orientation.kind = Orientation::Kind::radial_inward;
  p.orientation.center = {0.7, 0.4};
  const double m0 = mass_report(f).rho_a;
  advance_continuum(f, p, 0.2);
  CHECK(std::abs(mass_report(f).rho_a - m0) / m0 < 1e-12);
}

TEST_CASE("uniform self-propulsion translates the centroid at speed V") {
  ContinuumFields f(120, 40, 0.05);
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) {
      const Vec2 d = f.cell_center(i, j) - Vec2{3.0, 1.0};
      f.rho_a[f.index(i, j)] = std::exp(-d.norm2() / 0.02);
    }
  auto p = quiet();
  p.V = 2.0;
  p.k_hat = 0.0;
  p.orientation.kind = Orientation::Kind::uniform;
  p.orientation.direction = {3.0, 0.0};
  const Vec2 before = centroid(f);
  advance_continuum(f, p, 0.1);
  const Vec2 after = centroid(f);
  // upwinding smears but does not shift; walls are many widths away
  CHECK(after.x - before.x == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(after.y == doctest::Approx(before.y).epsilon(1e-9));
}

TEST_CASE("substrate blocks self-propulsion") {
  ContinuumFields f(40, 10, 0.05);
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) {
      const Vec2 d = f.cell_center(i, j) - Vec2{1.0, 0.25};
      f.rho_a[f.index(i, j)] = std::exp(-d.norm2() / 0.02);
    }
  std::fill(f.rho_s.begin(), f.rho_s.end(), 1.0);  // mobility zero everywhere
  auto p = quiet();
  p.V = 2.0;
  p.k_hat = 0.0;
  p.orientation.direction = {1.0, 0.0};
  const Vec2 before = centroid(f);
  advance_continuum(f, p, 0.1);
  CHECK(centroid(f).x == doctest::Approx(before.x).epsilon(1e-9));
}

TEST_CASE("step size beyond the stability limit is rejected") {
  ContinuumFields f(10, 10, 0.1);
  const auto p = quiet();
  const double lim = cfl_limit(f, p);
  CHECK(lim == doctest::Approx(0.9 * 0.01 / 4.0));
  CHECK_THROWS_AS(step_continuum(f, p, 1.01 * lim), ConfigError);
  CHECK_NOTHROW(step_continuum(f, p, lim));
  CHECK_THROWS_AS(step_continuum(f, p, 0.0), ConfigError);
}

TEST_CASE("presets") {
  const auto cons = load_preset("construction", 0.05);
  CHECK(cons.params.K == doctest::Approx(2.5 * std::sqrt(0.005 / 1.5) / 0.1).epsilon(1e-12));
  CHECK(cons.params.K == doctest::Approx(1.44338).epsilon(1e-5));
  CHECK(cons.params.V == doctest::Approx(1.1547).epsilon(1e-4));
  CHECK(cons.params.k_hat == doctest::Approx(1.0));
  CHECK(cons.params.D_c_nd == doctest::Approx(1.0));
  CHECK(cons.fields.width() == doctest::Approx(8.0));
  CHECK(cons.fields.height() == doctest::Approx(6.0));
  // substrate disk of radius 0.5
  CHECK(mass_report(cons.fields).rho_s == doctest::Approx(kPi * 0.25).epsilon(0.05));

  const auto dec = load_preset("deconstruction", 0.1);
  CHECK(dec.params.K == doctest::Approx(-cons.params.K));
  double mx = 0.0;
  for (double v : dec.fields.rho_a) mx = std::max(mx, v);
  CHECK(mx == doctest::Approx(1.0));

  CHECK_THROWS_AS(load_preset("sideways"), ConfigError);
  CHECK_THROWS_AS(load_preset("construction", 0.2), ConfigError);
}

TEST_CASE("substrate mass moves with the sign of K") {
  for (const char* name : {"construction", "deconstruction"}) {
    auto pre = load_preset(name, 0.1);
    double prev = mass_report(pre.fields).rho_s;
    bool monotone = true;
    advance_continuum(pre.fields, pre.params, 0.5, 0.5, [&](const ContinuumFields& f) {
      const double m = mass_report(f).rho_s;
      if (pre.params.K > 0.0 ? m < prev : m > prev) monotone = false;
      prev = m;
    });
    CHECK(monotone);
    const double start = mass_report(load_preset(name, 0.1).fields).rho_s;
    if (pre.params.K > 0.0)
      CHECK(prev > start);
    else
      CHECK(prev < start);
  }
}

TEST_CASE("coarsening") {
  const std::size_t nx = 6, ny = 4;
  std::vector<double> fine(nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) fine[j * nx + i] = 2.0 * i + 3.0 * j;
  const auto coarse = coarsen2(fine, nx, ny);
  REQUIRE(coarse.size() == 6);
  // averages of a linear function sit at block centres
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(coarse[j * 3 + i] == doctest::Approx(2.0 * (2.0 * i + 0.5) + 3.0 * (2.0 * j + 0.5)));
  CHECK_THROWS_AS(coarsen2(std::vector<double>(15), 5, 3), ConfigError);
  CHECK_THROWS_AS(coarsen2(fine, 4, 4), ConfigError);
}
