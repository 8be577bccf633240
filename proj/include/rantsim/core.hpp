#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace rantsim {

inline constexpr double kPi = 3.14159265358979323846;

/// Raised for any invalid parameter or configuration value. The message names
/// the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;

  double norm() const { return std::hypot(x, y); }
  constexpr double norm2() const { return x * x + y * y; }
  constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
};

/// Heading unit vector (cos θ, sin θ).
inline Vec2 heading_vec(double theta) { return {std::cos(theta), std::sin(theta)}; }
/// Left normal (−sin θ, cos θ).
inline Vec2 left_normal(double theta) { return {-std::sin(theta), std::cos(theta)}; }

/// Maps an angle into (−π, π].
double wrap_angle(double theta);

/// Seeded random stream. The engine is std::mt19937_64 (bit-exact by the
/// standard); the distributions are implemented here because the standard
/// library distributions are not reproducible across implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream = 0);

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box–Muller.
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Independent substream keyed by (seed, id); adding or removing other
  /// substreams leaves this one's sequence unchanged.
  RngStream substream(std::uint64_t id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer, used to derive substream seeds.
std::uint64_t mix64(std::uint64_t x);

enum class BoundaryMode { periodic, walls };

const char* to_string(BoundaryMode m);
BoundaryMode boundary_mode_from_string(const std::string& s);

struct SimConfig {
  double dt = 0.02;        // s
  double total_time = 600; // s
  double width = 0.67;     // m
  double height = 0.56;    // m
  BoundaryMode boundary = BoundaryMode::walls;
  std::uint64_t seed = 1;

  /// Arena-crossing time t_s = width / v_o.
  double crossing_time(double v_o) const { return width / v_o; }
  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// ΔW ~ Normal(0, dt). dt == 0 yields exactly 0.
double wiener_increment(RngStream& rng, double dt);

/// Periodic mode maps p into [0, width) × [0, height); walls mode returns p.
Vec2 wrap_or_clamp(Vec2 p, const SimConfig& cfg);

/// Minimum-image displacement b − a on a periodic box.
Vec2 periodic_delta(Vec2 a, Vec2 b, double width, double height);

}  // namespace rantsim
