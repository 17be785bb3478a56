#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "corrgen/chebyshev.hpp"
#include "corrgen/error.hpp"
#include "corrgen/path.hpp"

namespace corrgen {

/// Spatial corridor
///
///   g(xi, x) = x^T E(xi) x + d(xi)^T x - 1 <= 0
///
/// with E symmetric and every entry of E and d a Chebyshev polynomial of the
/// same degree over the path domain. `path` is optional for pure evaluation
/// but required for anything that maps back to world coordinates.
struct Corridor3D {
  ChebyshevPoly e11;
  ChebyshevPoly e12;
  ChebyshevPoly e22;
  ChebyshevPoly d1;
  ChebyshevPoly d2;
  std::shared_ptr<const ParametricPath> path;

  int degree() const { return e11.degree(); }
  Domain domain() const { return e11.domain(); }

  Mat2 matrix(double xi) const {
    const double off = e12(xi);
    Mat2 e;
    e << e11(xi), off, off, e22(xi);
    return e;
  }

  Vec2 offset(double xi) const { return {d1(xi), d2(xi)}; }

  /// Same corridor with every coefficient polynomial differentiated in xi.
  Corridor3D derivative() const {
    return {e11.derivative(), e12.derivative(), e22.derivative(), d1.derivative(), d2.derivative(), path};
  }
};

/// Planar corridor: the band b_minus(xi) <= x <= b_plus(xi) along the first
/// transverse axis.
struct Corridor2D {
  ChebyshevPoly b_plus;
  ChebyshevPoly b_minus;
  std::shared_ptr<const ParametricPath> path;

  int degree() const { return b_plus.degree(); }
  Domain domain() const { return b_plus.domain(); }
};

/// Cross-section of a Corridor3D in completed-square form
/// (x - center)^T matrix (x - center) = 1.
struct EllipseSlice {
  double xi = 0.0;
  Vec2 center = Vec2::Zero();
  Mat2 matrix = Mat2::Identity();
  // Major then minor semi-axis.
  std::array<double, 2> semi_axes{1.0, 1.0};
  // Direction of the major axis, radians in (-pi/2, pi/2].
  double angle = 0.0;
  double area = 0.0;
};

inline double eval_inequality(const Corridor3D& c, double xi, const Vec2& x) {
  return x.dot(c.matrix(xi) * x) + c.offset(xi).dot(x) - 1.0;
}

/// Closed-set membership.
inline bool contains(const Corridor3D& c, double xi, const Vec2& x) { return eval_inequality(c, xi, x) <= 0.0; }

inline bool contains(const Corridor2D& c, double xi, double x) { return c.b_minus(xi) <= x && x <= c.b_plus(xi); }

/// Signed clearance of x from the planar band: negative inside, zero on the
/// boundary, positive outside.
inline double eval_inequality(const Corridor2D& c, double xi, double x) {
  return std::max(x - c.b_plus(xi), c.b_minus(xi) - x);
}

inline EllipseSlice recover_ellipse(const Corridor3D& c, double xi) {
  const Mat2 e = c.matrix(xi);
  const Vec2 d = c.offset(xi);
  const Eigen::SelfAdjointEigenSolver<Mat2> eig_e(e);
  if (!(eig_e.eigenvalues()[0] > 0.0)) {
    std::ostringstream msg;
    msg << "ellipse matrix is not positive definite at xi=" << xi << " (min eigenvalue " << eig_e.eigenvalues()[0]
        << ")";
    throw DegenerateError(msg.str());
  }
  const Eigen::LLT<Mat2> llt(e);
  const Vec2 e_inv_d = llt.solve(d);
  const double q = 0.25 * d.dot(e_inv_d);

  EllipseSlice s;
  s.xi = xi;
  s.center = -0.5 * e_inv_d;
  s.matrix = e / (1.0 + q);
  const Eigen::SelfAdjointEigenSolver<Mat2> eig(s.matrix);
  s.semi_axes = {1.0 / std::sqrt(eig.eigenvalues()[0]), 1.0 / std::sqrt(eig.eigenvalues()[1])};
  Vec2 major = eig.eigenvectors().col(0);
  if (major.x() < 0.0 || (major.x() == 0.0 && major.y() < 0.0)) major = -major;
  s.angle = std::atan2(major.y(), major.x());
  s.area = std::acos(-1.0) * (1.0 + q) / std::sqrt(e.determinant());
  return s;
}

/// Boundary point of the slice at polar angle theta of its principal frame.
inline Vec2 slice_boundary_point(const EllipseSlice& s, double theta) {
  const Eigen::SelfAdjointEigenSolver<Mat2> eig(s.matrix);
  const Vec2 local(std::cos(theta) / std::sqrt(eig.eigenvalues()[0]), std::sin(theta) / std::sqrt(eig.eigenvalues()[1]));
  return s.center + eig.eigenvectors() * local;
}

/// Trapezoidal integral of the exact slice area along the domain.
inline double corridor_volume(const Corridor3D& c, int samples) {
  if (samples < 2) throw InputError("volume quadrature needs at least two samples");
  const auto xs = linspace(c.domain().lo, c.domain().hi, samples);
  double vol = 0.0;
  double prev = recover_ellipse(c, xs[0]).area;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double cur = recover_ellipse(c, xs[i]).area;
    vol += 0.5 * (prev + cur) * (xs[i] - xs[i - 1]);
    prev = cur;
  }
  return vol;
}

inline double corridor_area_2d(const Corridor2D& c, int samples) {
  if (samples < 2) throw InputError("area quadrature needs at least two samples");
  const auto xs = linspace(c.domain().lo, c.domain().hi, samples);
  double area = 0.0;
  double prev = c.b_plus(xs[0]) - c.b_minus(xs[0]);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double cur = c.b_plus(xs[i]) - c.b_minus(xs[i]);
    area += 0.5 * (prev + cur) * (xs[i] - xs[i - 1]);
    prev = cur;
  }
  return area;
}

/// Triangle mesh in world coordinates. Each vertex also records the path
/// parameter and transverse offset it was generated from.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<double> vertex_xi;
  std::vector<Vec2> vertex_perp;
};

namespace detail {

inline void stitch_rings(TriangleMesh& mesh, int stations, int ring, bool closed) {
  const int span = closed ? ring : ring - 1;
  for (int j = 0; j + 1 < stations; ++j) {
    for (int k = 0; k < span; ++k) {
      const int k1 = (k + 1) % ring;
      const int v00 = j * ring + k;
      const int v01 = j * ring + k1;
      const int v10 = (j + 1) * ring + k;
      const int v11 = (j + 1) * ring + k1;
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
}

inline const ParametricPath& require_path(const std::shared_ptr<const ParametricPath>& p) {
  if (!p) throw InputError("corridor has no reference path attached");
  return *p;
}

}  // namespace detail

/// Tube surface: `ring` boundary points per slice at `stations` equispaced
/// parameters, consecutive rings stitched into triangles.
inline TriangleMesh sample_boundary_mesh(const Corridor3D& c, int stations, int ring) {
  if (stations < 2) throw InputError("mesh needs at least two stations");
  if (ring < 3) throw InputError("mesh ring needs at least three points");
  const ParametricPath& path = detail::require_path(c.path);
  TriangleMesh mesh;
  const double two_pi = 2.0 * std::acos(-1.0);
  for (double xi : linspace(c.domain().lo, c.domain().hi, stations)) {
    const EllipseSlice s = recover_ellipse(c, xi);
    const FrameStation f = path.eval(xi);
    for (int k = 0; k < ring; ++k) {
      // Nudged inward by a relative 1e-12 so rounding never puts a vertex
      // outside the closed corridor.
      const Vec2 on = slice_boundary_point(s, two_pi * k / ring);
      const Vec2 x = s.center + (1.0 - 1e-12) * (on - s.center);
      mesh.vertices.push_back(f.position + f.rotation * Vec3(0.0, x.x(), x.y()));
      mesh.vertex_xi.push_back(xi);
      mesh.vertex_perp.push_back(x);
    }
  }
  detail::stitch_rings(mesh, stations, ring, true);
  return mesh;
}

/// Planar band as a strip between the two bounds.
inline TriangleMesh sample_boundary_mesh(const Corridor2D& c, int stations) {
  if (stations < 2) throw InputError("mesh needs at least two stations");
  const ParametricPath& path = detail::require_path(c.path);
  TriangleMesh mesh;
  for (double xi : linspace(c.domain().lo, c.domain().hi, stations)) {
    const FrameStation f = path.eval(xi);
    for (double b : {c.b_minus(xi), c.b_plus(xi)}) {
      mesh.vertices.push_back(f.position + f.rotation * Vec3(0.0, b, 0.0));
      mesh.vertex_xi.push_back(xi);
      mesh.vertex_perp.push_back(Vec2(b, 0.0));
    }
  }
  detail::stitch_rings(mesh, stations, 2, false);
  return mesh;
}

}  // namespace corrgen
