#include "rantsim/core.hpp"

#include <cmath>

namespace rantsim {

double wrap_angle(double theta) {
  double t = std::remainder(theta, 2.0 * kPi);  // in [−π, π]
  if (t <= -kPi) t += 2.0 * kPi;
  return t;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(mix64(seed ^ mix64(stream + 0x5851F42D4C957F2DULL))) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  spare_ = rad * std::sin(2.0 * kPi * u2);
  has_spare_ = true;
  return rad * std::cos(2.0 * kPi * u2);
}

RngStream RngStream::substream(std::uint64_t id) const {
  return RngStream(seed_, mix64(stream_ * 0x100000001B3ULL + id + 1));
}

const char* to_string(BoundaryMode m) {
  return m == BoundaryMode::periodic ? "periodic" : "walls";
}

BoundaryMode boundary_mode_from_string(const std::string& s) {
  if (s == "periodic") return BoundaryMode::periodic;
  if (s == "walls") return BoundaryMode::walls;
  throw ConfigError("boundary: expected 'periodic' or 'walls', got '" + s + "'");
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt: must be > 0");
  if (!(total_time >= dt)) throw ConfigError("total_time: must be >= dt");
  if (!(width > 0.0)) throw ConfigError("width: must be > 0");
  if (!(height > 0.0)) throw ConfigError("height: must be > 0");
}

double wiener_increment(RngStream& rng, double dt) {
  if (dt < 0.0) throw ConfigError("dt: must be >= 0");
  if (dt == 0.0) return 0.0;
  return std::sqrt(dt) * rng.normal();
}

namespace {
double wrap_coord(double v, double len) {
  double r = std::fmod(v, len);
  if (r < 0.0) r += len;
  if (r >= len) r -= len;  // fmod of tiny negatives can round up to len
  return r;
}
}  // namespace

Vec2 wrap_or_clamp(Vec2 p, const SimConfig& cfg) {
  if (cfg.boundary == BoundaryMode::walls) return p;
  return {wrap_coord(p.x, cfg.width), wrap_coord(p.y, cfg.height)};
}

Vec2 periodic_delta(Vec2 a, Vec2 b, double width, double height) {
  Vec2 d = b - a;
  d.x -= width * std::round(d.x / width);
  d.y -= height * std::round(d.y / height);
  return d;
}

}  // namespace rantsim
