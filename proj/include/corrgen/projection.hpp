#pragma once

#include <algorithm>
#include <cmath>
#include <iterator>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "corrgen/chebyshev.hpp"
#include "corrgen/error.hpp"
#include "corrgen/path.hpp"

namespace corrgen {

/// Obstacle points in world coordinates (meters). `planar` marks clouds
/// read from two-column files, where z is implied zero.
struct RawCloud {
  std::vector<Vec3> points;
  bool planar = false;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Points expressed in path coordinates: the parameter of the closest path
/// point and the offset inside the transverse plane (components along the
/// first and second frame normals).
struct ProjectedCloud {
  static constexpr std::size_t kSynthetic = std::numeric_limits<std::size_t>::max();

  std::vector<double> par;
  std::vector<Vec2> ortho;
  std::vector<std::size_t> source_index;
  std::vector<char> end_cap;

  std::size_t size() const { return par.size(); }
  bool empty() const { return par.empty(); }

  void push_back(double xi, const Vec2& perp, std::size_t source, bool cap = false) {
    par.push_back(xi);
    ortho.push_back(perp);
    source_index.push_back(source);
    end_cap.push_back(cap ? 1 : 0);
  }

  void append(const ProjectedCloud& other) {
    for (std::size_t i = 0; i < other.size(); ++i) {
      push_back(other.par[i], other.ortho[i], other.source_index[i], other.end_cap[i] != 0);
    }
  }

  bool is_synthetic(std::size_t i) const { return source_index[i] == kSynthetic; }
};

struct ProjectionOptions {
  /// Keep points whose closest path point is an endpoint and whose offset
  /// has a tangential part. Dropped by default.
  bool keep_end_caps = false;
  /// Tangential residual tolerance relative to the path length.
  double tangential_tol_rel = 1e-6;
  int golden_iterations = 30;
};

/// Projection of one point, including the tangential part of the offset.
struct PointProjection {
  double par = 0.0;
  Vec2 ortho = Vec2::Zero();
  double tangential = 0.0;
  bool end_cap = false;
};

namespace detail {

// Relative slack under which two squared distances count as a tie; ties go
// to the smaller parameter.
inline bool no_worse(double candidate, double incumbent) { return candidate <= incumbent * (1.0 + 1e-12); }

}  // namespace detail

/// Closest point on the path (coarse station search, then golden-section
/// refinement on the bracketing interval) and the transverse offset there.
inline PointProjection project_point(const ParametricPath& path, const Vec3& p, const ProjectionOptions& opts = {}) {
  const auto& st = path.stations();
  const std::size_t n = st.size();
  std::vector<double> d2s(n);
  double min_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    d2s[i] = (p - st[i].position).squaredNorm();
    min_d2 = std::min(min_d2, d2s[i]);
  }
  std::size_t best = 0;
  while (!detail::no_worse(d2s[best], min_d2)) ++best;

  const auto dist2 = [&](double xi) { return (p - path.position(xi)).squaredNorm(); };
  double a = st[best == 0 ? 0 : best - 1].xi;
  double b = st[std::min(best + 1, n - 1)].xi;
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = dist2(c);
  double fd = dist2(d);
  for (int it = 0; it < opts.golden_iterations; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = dist2(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = dist2(d);
    }
  }
  // Candidates in ascending parameter order; a later one must beat the
  // incumbent by more than the tie slack.
  const double lo_xi = a;
  const double hi_xi = b;
  const double mid_xi = 0.5 * (a + b);
  const double station_xi = st[best].xi;
  double cands[4] = {lo_xi, mid_xi, hi_xi, station_xi};
  std::sort(std::begin(cands), std::end(cands));
  double xi = cands[0];
  double fx = dist2(xi);
  for (int k = 1; k < 4; ++k) {
    const double f = dist2(cands[k]);
    if (!detail::no_worse(fx, f)) {
      xi = cands[k];
      fx = f;
    }
  }
  const Domain dom = path.domain();
  // Gauss-Newton polish on the tangential residual.
  for (int it = 0; it < 3; ++it) {
    const Vec3 vel = path.velocity(xi);
    const double speed2 = vel.squaredNorm();
    if (!(speed2 > 0.0)) break;
    const double cand = std::clamp(xi + vel.dot(p - path.position(xi)) / speed2, dom.lo, dom.hi);
    const double fc = dist2(cand);
    if (!(fc < fx)) break;
    xi = cand;
    fx = fc;
  }
  for (double edge : {dom.lo, dom.hi}) {
    if (std::abs(xi - edge) <= 1e-6 * dom.width() && detail::no_worse(dist2(edge), fx)) xi = edge;
  }

  const FrameStation frame = path.eval(xi);
  const Vec3 local = frame.rotation.transpose() * (p - frame.position);
  PointProjection out;
  out.par = xi;
  out.ortho = local.tail<2>();
  out.tangential = local.x();
  const bool at_edge = xi == dom.lo || xi == dom.hi;
  out.end_cap = at_edge && std::abs(local.x()) > opts.tangential_tol_rel * path.length();
  return out;
}

/// Projects every point independently. End-cap points are dropped unless
/// `opts.keep_end_caps` is set (they are then flagged in `end_cap`).
inline ProjectedCloud project_cloud(const ParametricPath& path, std::span<const Vec3> points,
                                    const ProjectionOptions& opts = {}) {
  ProjectedCloud out;
  out.par.reserve(points.size());
  out.ortho.reserve(points.size());
  out.source_index.reserve(points.size());
  out.end_cap.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) throw InputError("non-finite point at index " + std::to_string(i));
    const PointProjection pr = project_point(path, points[i], opts);
    if (pr.end_cap && !opts.keep_end_caps) continue;
    out.push_back(pr.par, pr.ortho, i, pr.end_cap);
  }
  return out;
}

inline ProjectedCloud project_cloud(const ParametricPath& path, const RawCloud& cloud,
                                    const ProjectionOptions& opts = {}) {
  return project_cloud(path, std::span<const Vec3>(cloud.points), opts);
}

/// Synthetic shell around the path: `ring_points` points on a circle of
/// `radius` in the transverse plane at each of `stations` equispaced
/// parameters.
struct WrapperConfig {
  double radius = 1.0;
  int ring_points = 16;
  int stations = 100;

  void validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("wrapper radius must be positive");
    if (ring_points < 8) throw InputError("wrapper ring_points must be at least 8");
    if (stations < 2) throw InputError("wrapper stations must be at least 2");
  }
};

/// Drops points beyond the wrapper radius and appends the wrapper shell.
inline ProjectedCloud apply_wrapper(const ProjectedCloud& projected, const WrapperConfig& config, const Domain& domain) {
  config.validate();
  ProjectedCloud out;
  for (std::size_t i = 0; i < projected.size(); ++i) {
    if (projected.ortho[i].norm() > config.radius) continue;
    out.push_back(projected.par[i], projected.ortho[i], projected.source_index[i], projected.end_cap[i] != 0);
  }
  const double two_pi = 2.0 * std::acos(-1.0);
  for (double xi : linspace(domain.lo, domain.hi, config.stations)) {
    for (int k = 0; k < config.ring_points; ++k) {
      const double ang = two_pi * k / config.ring_points;
      out.push_back(xi, config.radius * Vec2(std::cos(ang), std::sin(ang)), ProjectedCloud::kSynthetic);
    }
  }
  return out;
}

inline ProjectedCloud apply_wrapper(const ProjectedCloud& projected, const WrapperConfig& config,
                                    const ParametricPath& path) {
  return apply_wrapper(projected, config, path.domain());
}

/// Planar wrapper: two lines at +radius and -radius along `axis` of the
/// transverse offset, sampled at `stations` equispaced parameters.
inline ProjectedCloud apply_planar_wrapper(const ProjectedCloud& projected, double radius, int stations,
                                           const Domain& domain, int axis = 0) {
  if (!(radius > 0.0)) throw InputError("wrapper radius must be positive");
  ProjectedCloud out;
  for (std::size_t i = 0; i < projected.size(); ++i) {
    if (std::abs(projected.ortho[i][axis]) > radius) continue;
    out.push_back(projected.par[i], projected.ortho[i], projected.source_index[i], projected.end_cap[i] != 0);
  }
  for (double xi : linspace(domain.lo, domain.hi, stations)) {
    Vec2 up = Vec2::Zero();
    up[axis] = radius;
    out.push_back(xi, up, ProjectedCloud::kSynthetic);
    out.push_back(xi, -up, ProjectedCloud::kSynthetic);
  }
  return out;
}

/// Partition by the sign of the designated transverse coordinate. Points
/// with a zero coordinate go to both sides.
inline std::pair<ProjectedCloud, ProjectedCloud> split_planar(const ProjectedCloud& projected, int axis = 0) {
  std::pair<ProjectedCloud, ProjectedCloud> sides;
  for (std::size_t i = 0; i < projected.size(); ++i) {
    const double v = projected.ortho[i][axis];
    const bool cap = projected.end_cap[i] != 0;
    if (v >= 0.0) sides.first.push_back(projected.par[i], projected.ortho[i], projected.source_index[i], cap);
    if (v <= 0.0) sides.second.push_back(projected.par[i], projected.ortho[i], projected.source_index[i], cap);
  }
  return sides;
}

}  // namespace corrgen
