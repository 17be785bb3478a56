#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "corrgen/chebyshev.hpp"
#include "corrgen/error.hpp"

namespace corrgen {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// One sample of the moving frame. Rotation columns are the unit tangent,
/// the first normal and the second normal; the two normals span the
/// transverse plane at this station.
struct FrameStation {
  double xi = 0.0;
  Vec3 position = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
};

namespace detail {

inline double so3_error(const Mat3& r) {
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  return std::max(ortho, std::abs(r.determinant() - 1.0));
}

// Gram-Schmidt with the first column pinned to `tangent`.
inline Mat3 orthonormalize(const Vec3& tangent, const Vec3& normal_hint) {
  const Vec3 t = tangent.normalized();
  Vec3 n = normal_hint - normal_hint.dot(t) * t;
  if (n.norm() < 1e-12) {
    // Hint parallel to the tangent; pick any perpendicular direction.
    n = std::abs(t.z()) < 0.9 ? Vec3::UnitZ().cross(t) : Vec3::UnitX().cross(t);
  }
  n.normalize();
  Mat3 r;
  r.col(0) = t;
  r.col(1) = n;
  r.col(2) = t.cross(n);
  return r;
}

// Frame whose second normal is the world z axis projected onto the
// transverse plane. A path along +x gets the identity; planar paths in the
// xy plane keep their first normal in the plane.
inline Mat3 initial_frame(const Vec3& tangent) {
  const Vec3 t = tangent.normalized();
  Vec3 up = Vec3::UnitZ() - Vec3::UnitZ().dot(t) * t;
  if (up.norm() < 1e-6) up = Vec3::UnitX() - Vec3::UnitX().dot(t) * t;
  up.normalize();
  return orthonormalize(t, up.cross(t));
}

}  // namespace detail

/// Reference path with an attached moving frame, stored as dense stations.
///
/// Positions between stations follow cubic Hermite interpolation whose
/// station derivatives are aligned with the frame tangent, so the evaluated
/// curve is C1 and its tangent agrees with the first frame column. Rotations
/// between stations are slerped and then re-orthonormalized against that
/// tangent. Immutable after construction.
class ParametricPath {
 public:
  /// Validates and adopts externally supplied stations. Rotations within
  /// 1e-6 of SO(3) are projected back onto it; worse ones are rejected.
  static ParametricPath from_stations(std::vector<FrameStation> stations) {
    if (stations.size() < 2) throw InputError("a path needs at least two stations");
    for (std::size_t i = 0; i < stations.size(); ++i) {
      const auto& st = stations[i];
      if (!st.position.allFinite() || !st.rotation.allFinite() || !std::isfinite(st.xi)) {
        throw InputError("non-finite value in path station " + std::to_string(i));
      }
      if (i > 0 && !(st.xi > stations[i - 1].xi)) {
        throw InputError("station parameters must be strictly increasing (station " + std::to_string(i) + ")");
      }
      if (detail::so3_error(st.rotation) > 1e-6) {
        throw InputError("station " + std::to_string(i) + " rotation is not in SO(3)");
      }
    }
    for (auto& st : stations) {
      Eigen::JacobiSVD<Mat3> svd(st.rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
      st.rotation = svd.matrixU() * svd.matrixV().transpose();
      st.rotation = detail::orthonormalize(st.rotation.col(0), st.rotation.col(1));
    }
    for (std::size_t i = 1; i + 1 < stations.size(); ++i) {
      const Vec3 fd = stations[i + 1].position - stations[i - 1].position;
      if (fd.norm() == 0.0) throw DegenerateError("zero-length path around station " + std::to_string(i));
      if (stations[i].rotation.col(0).dot(fd.normalized()) < 0.99) {
        throw InputError("station " + std::to_string(i) + " rotation is not aligned with the path tangent");
      }
    }
    return ParametricPath(std::move(stations));
  }

  const std::vector<FrameStation>& stations() const { return stations_; }
  Domain domain() const { return {stations_.front().xi, stations_.back().xi}; }

  /// Polyline length through the stations.
  double length() const {
    double len = 0.0;
    for (std::size_t i = 1; i < stations_.size(); ++i) len += (stations_[i].position - stations_[i - 1].position).norm();
    return len;
  }

  /// Largest parameter gap between consecutive stations.
  double max_spacing() const {
    double h = 0.0;
    for (std::size_t i = 1; i < stations_.size(); ++i) h = std::max(h, stations_[i].xi - stations_[i - 1].xi);
    return h;
  }

  Vec3 position(double xi) const {
    const auto [i, u] = locate(xi);
    const double h = stations_[i + 1].xi - stations_[i].xi;
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * stations_[i].position + (u3 - 2 * u2 + u) * h * derivs_[i] +
           (-2 * u3 + 3 * u2) * stations_[i + 1].position + (u3 - u2) * h * derivs_[i + 1];
  }

  /// d(position)/d(xi).
  Vec3 velocity(double xi) const {
    const auto [i, u] = locate(xi);
    const double h = stations_[i + 1].xi - stations_[i].xi;
    const double u2 = u * u;
    return ((6 * u2 - 6 * u) * stations_[i].position + (3 * u2 - 4 * u + 1) * h * derivs_[i] +
            (-6 * u2 + 6 * u) * stations_[i + 1].position + (3 * u2 - 2 * u) * h * derivs_[i + 1]) /
           h;
  }

  Mat3 rotation(double xi) const {
    const auto [i, u] = locate(xi);
    if (u == 0.0) return stations_[i].rotation;
    if (u == 1.0) return stations_[i + 1].rotation;
    const Eigen::Quaterniond qa(stations_[i].rotation);
    const Eigen::Quaterniond qb(stations_[i + 1].rotation);
    const Mat3 blended = qa.slerp(u, qb).normalized().toRotationMatrix();
    return detail::orthonormalize(velocity(xi), blended.col(1));
  }

  FrameStation eval(double xi) const {
    const auto [i, u] = locate(xi);
    if (u == 0.0) return stations_[i];
    if (u == 1.0) return stations_[i + 1];
    return {xi, position(xi), rotation(xi)};
  }

 private:
  explicit ParametricPath(std::vector<FrameStation> stations) : stations_(std::move(stations)) {
    // Station derivatives point along the frame tangent with the local
    // finite-difference speed.
    const std::size_t n = stations_.size();
    derivs_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      Vec3 fd;
      if (i == 0) {
        fd = (stations_[1].position - stations_[0].position) / (stations_[1].xi - stations_[0].xi);
      } else if (i + 1 == n) {
        fd = (stations_[n - 1].position - stations_[n - 2].position) / (stations_[n - 1].xi - stations_[n - 2].xi);
      } else {
        const double h1 = stations_[i].xi - stations_[i - 1].xi;
        const double h2 = stations_[i + 1].xi - stations_[i].xi;
        fd = -h2 / (h1 * (h1 + h2)) * stations_[i - 1].position + (h2 - h1) / (h1 * h2) * stations_[i].position +
             h1 / (h2 * (h1 + h2)) * stations_[i + 1].position;
      }
      derivs_[i] = stations_[i].rotation.col(0) * fd.norm();
    }
  }

  // Segment index and local coordinate u in [0, 1].
  std::pair<std::size_t, double> locate(double xi) const {
    const Domain dom = domain();
    if (!(xi >= dom.lo - dom.slack() && xi <= dom.hi + dom.slack())) {
      std::ostringstream msg;
      msg << "path parameter " << xi << " outside [" << dom.lo << ", " << dom.hi << "]";
      throw DomainError(msg.str());
    }
    xi = std::clamp(xi, dom.lo, dom.hi);
    const auto it = std::upper_bound(stations_.begin(), stations_.end(), xi,
                                     [](double v, const FrameStation& st) { return v < st.xi; });
    std::size_t i = static_cast<std::size_t>(std::distance(stations_.begin(), it));
    i = std::min(i == 0 ? 0 : i - 1, stations_.size() - 2);
    const double u = (xi - stations_[i].xi) / (stations_[i + 1].xi - stations_[i].xi);
    return {i, std::clamp(u, 0.0, 1.0)};
  }

  std::vector<FrameStation> stations_;
  std::vector<Vec3> derivs_;
};

/// Catmull-Rom interpolation through `waypoints` sampled into stations,
/// with parallel-transported frames and xi = normalized chord length.
inline ParametricPath build_path_from_waypoints(const std::vector<Vec3>& waypoints, int samples_per_segment) {
  if (waypoints.size() < 2) throw InputError("at least two waypoints are required");
  if (samples_per_segment < 1) throw InputError("samples_per_segment must be positive");
  double scale = 0.0;
  for (const auto& w : waypoints) {
    if (!w.allFinite()) throw InputError("non-finite waypoint");
    scale = std::max(scale, w.cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    if ((waypoints[i] - waypoints[i - 1]).norm() <= 1e-12 * std::max(1.0, scale)) {
      throw DegenerateError("duplicate consecutive waypoints at index " + std::to_string(i));
    }
  }

  const std::size_t segs = waypoints.size() - 1;
  std::vector<Vec3> tangents(waypoints.size());
  tangents.front() = waypoints[1] - waypoints[0];
  tangents.back() = waypoints[segs] - waypoints[segs - 1];
  for (std::size_t i = 1; i < segs; ++i) tangents[i] = 0.5 * (waypoints[i + 1] - waypoints[i - 1]);

  std::vector<Vec3> pos;
  std::vector<Vec3> vel;
  pos.reserve(segs * samples_per_segment + 1);
  vel.reserve(segs * samples_per_segment + 1);
  for (std::size_t s = 0; s < segs; ++s) {
    const Vec3& p0 = waypoints[s];
    const Vec3& p1 = waypoints[s + 1];
    const Vec3& m0 = tangents[s];
    const Vec3& m1 = tangents[s + 1];
    const int count = (s + 1 == segs) ? samples_per_segment + 1 : samples_per_segment;
    for (int j = 0; j < count; ++j) {
      const double u = static_cast<double>(j) / samples_per_segment;
      const double u2 = u * u;
      const double u3 = u2 * u;
      pos.push_back((2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * p1 + (u3 - u2) * m1);
      vel.push_back((6 * u2 - 6 * u) * p0 + (3 * u2 - 4 * u + 1) * m0 + (-6 * u2 + 6 * u) * p1 + (3 * u2 - 2 * u) * m1);
    }
  }

  std::vector<double> chord(pos.size(), 0.0);
  for (std::size_t i = 1; i < pos.size(); ++i) {
    const double step = (pos[i] - pos[i - 1]).norm();
    if (step <= 1e-14 * std::max(1.0, scale)) throw DegenerateError("interpolant stalls between waypoints");
    chord[i] = chord[i - 1] + step;
  }
  for (const auto& v : vel) {
    if (v.norm() <= 1e-12 * std::max(1.0, scale)) throw DegenerateError("interpolant has a vanishing tangent");
  }

  // Double-reflection parallel transport.
  std::vector<FrameStation> stations(pos.size());
  Mat3 frame = detail::initial_frame(vel[0]);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (i > 0) {
      const Vec3 v1 = pos[i] - pos[i - 1];
      const double c1 = v1.squaredNorm();
      const Vec3 r_prev = frame.col(1);
      const Vec3 t_prev = frame.col(0);
      const Vec3 r_l = r_prev - (2.0 / c1) * v1.dot(r_prev) * v1;
      const Vec3 t_l = t_prev - (2.0 / c1) * v1.dot(t_prev) * v1;
      const Vec3 t_next = vel[i].normalized();
      const Vec3 v2 = t_next - t_l;
      const double c2 = v2.squaredNorm();
      const Vec3 r_next = c2 > 1e-30 ? Vec3(r_l - (2.0 / c2) * v2.dot(r_l) * v2) : r_l;
      frame = detail::orthonormalize(t_next, r_next);
    }
    stations[i].xi = chord[i] / chord.back();
    stations[i].position = pos[i];
    stations[i].rotation = frame;
  }
  stations.front().xi = 0.0;
  stations.back().xi = 1.0;
  return ParametricPath::from_stations(std::move(stations));
}

}  // namespace corrgen
