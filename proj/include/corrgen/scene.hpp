#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "corrgen/error.hpp"
#include "corrgen/path.hpp"
#include "corrgen/projection.hpp"

namespace corrgen {

enum class SceneKind { Columns, Rings, Mixed, Channel, Cylinder };

inline const char* to_string(SceneKind k) {
  switch (k) {
    case SceneKind::Columns: return "columns";
    case SceneKind::Rings: return "rings";
    case SceneKind::Mixed: return "mixed";
    case SceneKind::Channel: return "channel";
    case SceneKind::Cylinder: return "cylinder";
  }
  return "unknown";
}

inline SceneKind parse_scene_kind(const std::string& s) {
  if (s == "columns") return SceneKind::Columns;
  if (s == "rings") return SceneKind::Rings;
  if (s == "mixed") return SceneKind::Mixed;
  if (s == "channel") return SceneKind::Channel;
  if (s == "cylinder") return SceneKind::Cylinder;
  throw InputError("unknown scene kind '" + s + "'");
}

struct Box {
  Vec3 min = Vec3(0.0, -2.0, -2.0);
  Vec3 max = Vec3(10.0, 2.0, 2.0);

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Synthetic obstacle field around a straight reference path that runs along
/// +x through the middle of `extent`.
///
/// columns   vertical cylinders spanning the full height of the box
/// rings     circular loops crossed by the path, tilted up to 20 degrees
/// mixed     each obstacle is a column or a ring with equal odds
/// cylinder  `count` rings of `density` points at radius `radius`
/// channel   two walls at y = +-radius, `density` points each, z = 0
///
/// Obstacles are rejected and redrawn when any point comes closer than
/// `clearance` to the path or leaves the box.
struct SceneSpec {
  SceneKind kind = SceneKind::Mixed;
  std::uint64_t seed = 0;
  int count = 8;
  // Points per obstacle (per ring for the cylinder, per wall for the channel).
  int density = 300;
  Box extent{};
  Range column_radius{0.15, 0.5};
  Range ring_radius{0.8, 1.6};
  double clearance = 0.3;
  // Cylinder radius or channel half-width.
  double radius = 1.0;

  static SceneSpec cylinder(double radius, int rings, int ring_points, double length = 1.0) {
    SceneSpec s;
    s.kind = SceneKind::Cylinder;
    s.radius = radius;
    s.count = rings;
    s.density = ring_points;
    s.extent = {Vec3(0.0, -radius, -radius), Vec3(length, radius, radius)};
    return s;
  }

  static SceneSpec channel(double half_width, int points_per_wall, double length = 1.0) {
    SceneSpec s;
    s.kind = SceneKind::Channel;
    s.radius = half_width;
    s.count = 2;
    s.density = points_per_wall;
    s.extent = {Vec3(0.0, -half_width, 0.0), Vec3(length, half_width, 0.0)};
    return s;
  }

  void validate() const {
    if (count < 0) throw InputError("scene count must be non-negative");
    if (density < 1) throw InputError("scene density must be at least 1");
    if (!(extent.min.array() <= extent.max.array()).all()) throw InputError("scene extent is inverted");
    if (!(radius > 0.0)) throw InputError("scene radius must be positive");
    if (kind == SceneKind::Columns || kind == SceneKind::Rings || kind == SceneKind::Mixed) {
      if (!(column_radius.lo > 0.0 && column_radius.lo <= column_radius.hi)) throw InputError("bad column radius range");
      if (!(ring_radius.lo > 0.0 && ring_radius.lo <= ring_radius.hi)) throw InputError("bad ring radius range");
      if (!(clearance > 0.0)) throw InputError("clearance must be positive");
      if (!(extent.max.x() > extent.min.x())) throw InputError("scene extent needs positive length along x");
    }
  }

  /// Start and end of the reference path.
  std::pair<Vec3, Vec3> path_endpoints() const {
    const Vec3 mid = 0.5 * (extent.min + extent.max);
    return {Vec3(extent.min.x(), mid.y(), mid.z()), Vec3(extent.max.x(), mid.y(), mid.z())};
  }
};

namespace detail {

// mt19937_64 with a fixed double mapping (top 53 bits), so identical seeds
// give identical scenes on every platform.
class SceneRng {
 public:
  explicit SceneRng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 gen_;
};

inline double distance_to_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

inline std::vector<Vec3> make_column(SceneRng& rng, const SceneSpec& s) {
  const double r = rng.uniform(s.column_radius.lo, s.column_radius.hi);
  const double cx = rng.uniform(s.extent.min.x() + r, s.extent.max.x() - r);
  const double cy = rng.uniform(s.extent.min.y() + r, s.extent.max.y() - r);
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(s.density));
  const double two_pi = 2.0 * std::acos(-1.0);
  for (int i = 0; i < s.density; ++i) {
    const double ang = rng.uniform(0.0, two_pi);
    const double z = rng.uniform(s.extent.min.z(), s.extent.max.z());
    pts.emplace_back(cx + r * std::cos(ang), cy + r * std::sin(ang), z);
  }
  return pts;
}

inline std::vector<Vec3> make_ring(SceneRng& rng, const SceneSpec& s) {
  const auto [start, end] = s.path_endpoints();
  const double r = rng.uniform(s.ring_radius.lo, s.ring_radius.hi);
  const double cx = rng.uniform(s.extent.min.x() + 0.1 * (s.extent.max.x() - s.extent.min.x()),
                                s.extent.max.x() - 0.1 * (s.extent.max.x() - s.extent.min.x()));
  const double off_max = std::max(0.0, r - s.clearance) * 0.6;
  const Vec3 center(cx, start.y() + rng.uniform(-off_max, off_max), start.z() + rng.uniform(-off_max, off_max));
  const double deg = std::acos(-1.0) / 180.0;
  const double yaw = rng.uniform(-20.0, 20.0) * deg;
  const double pitch = rng.uniform(-20.0, 20.0) * deg;
  const Mat3 rot = (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY())).toRotationMatrix();
  const Vec3 u = rot * Vec3::UnitY();
  const Vec3 v = rot * Vec3::UnitZ();
  const double two_pi = 2.0 * std::acos(-1.0);
  const double phase = rng.uniform(0.0, two_pi);
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(s.density));
  for (int i = 0; i < s.density; ++i) {
    const double ang = phase + two_pi * i / s.density;
    pts.push_back(center + r * (std::cos(ang) * u + std::sin(ang) * v));
  }
  return pts;
}

}  // namespace detail

/// Deterministic obstacle cloud for `spec`.
inline RawCloud generate_scene(const SceneSpec& spec) {
  spec.validate();
  RawCloud cloud;
  const double two_pi = 2.0 * std::acos(-1.0);
  if (spec.kind == SceneKind::Cylinder) {
    const double len = spec.extent.max.x() - spec.extent.min.x();
    for (int j = 0; j < spec.count; ++j) {
      const double x = spec.extent.min.x() + (spec.count > 1 ? len * j / (spec.count - 1) : 0.0);
      for (int k = 0; k < spec.density; ++k) {
        const double ang = two_pi * k / spec.density;
        cloud.points.emplace_back(x, spec.radius * std::cos(ang), spec.radius * std::sin(ang));
      }
    }
    return cloud;
  }
  if (spec.kind == SceneKind::Channel) {
    const double len = spec.extent.max.x() - spec.extent.min.x();
    for (double side : {1.0, -1.0}) {
      for (int k = 0; k < spec.density; ++k) {
        const double x = spec.extent.min.x() + (spec.density > 1 ? len * k / (spec.density - 1) : 0.0);
        cloud.points.emplace_back(x, side * spec.radius, 0.0);
      }
    }
    return cloud;
  }

  detail::SceneRng rng(spec.seed);
  const auto [start, end] = spec.path_endpoints();
  for (int obstacle = 0; obstacle < spec.count; ++obstacle) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      bool ring = spec.kind == SceneKind::Rings;
      if (spec.kind == SceneKind::Mixed) ring = rng.uniform() < 0.5;
      const std::vector<Vec3> pts = ring ? detail::make_ring(rng, spec) : detail::make_column(rng, spec);
      bool ok = true;
      for (const auto& p : pts) {
        if (!spec.extent.contains(p) || detail::distance_to_segment(p, start, end) < spec.clearance) {
          ok = false;
          break;
        }
      }
      if (ok) {
        cloud.points.insert(cloud.points.end(), pts.begin(), pts.end());
        break;
      }
    }
  }
  return cloud;
}

/// Straight reference path for the scene (planar for the channel).
inline ParametricPath default_scene_path(const SceneSpec& spec, int samples = 100) {
  const auto [start, end] = spec.path_endpoints();
  return build_path_from_waypoints({start, end}, samples);
}

}  // namespace corrgen
