#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "corrgen/projection.hpp"

using namespace corrgen;

namespace {

ParametricPath straight() { return build_path_from_waypoints({{0, 0, 0}, {1, 0, 0}}, 10); }

ParametricPath wiggle() {
  return build_path_from_waypoints({{0, 0, 0}, {2, 1, 0}, {4, 0, 1}, {6, -1, 1}, {8, 0, 0}}, 40);
}

std::vector<Vec3> cloud_near(const ParametricPath& p, int n, double radius, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) {
    const FrameStation f = p.eval(0.05 + 0.9 * u(rng));
    const double ang = 2 * M_PI * u(rng);
    const double r = radius * u(rng);
    pts.push_back(f.position + f.rotation * Vec3(0, r * std::cos(ang), r * std::sin(ang)));
  }
  return pts;
}

}  // namespace

TEST(Project, StraightPathExample) {
  const ParametricPath p = straight();
  const PointProjection pr = project_point(p, Vec3(0.5, 0.3, -0.2));
  EXPECT_NEAR(pr.par, 0.5, 1e-9);
  EXPECT_NEAR(pr.ortho.x(), 0.3, 1e-9);
  EXPECT_NEAR(pr.ortho.y(), -0.2, 1e-9);
  EXPECT_FALSE(pr.end_cap);
}

TEST(Project, PointOnPath) {
  const PointProjection pr = project_point(straight(), Vec3(0.25, 0, 0));
  EXPECT_NEAR(pr.par, 0.25, 1e-9);
  EXPECT_NEAR(pr.ortho.norm(), 0.0, 1e-9);
}

TEST(Project, QuarterArcCenterMatchesDenseArgmin) {
  std::vector<Vec3> wps;
  for (int k = 0; k <= 30; ++k) {
    const double t = 0.5 * M_PI * k / 30;
    wps.emplace_back(std::cos(t), std::sin(t), 0.0);
  }
  const ParametricPath p = build_path_from_waypoints(wps, 10);
  const Vec3 c(0, 0, 0);
  const PointProjection pr = project_point(p, c);
  EXPECT_NEAR(pr.ortho.norm(), 1.0, 1e-3);

  // Dense brute force; ties within the slack resolve to the smallest xi.
  const int n = 100000;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> d(n + 1);
  for (int i = 0; i <= n; ++i) {
    d[static_cast<std::size_t>(i)] = (p.position(static_cast<double>(i) / n) - c).norm();
    best = std::min(best, d[static_cast<std::size_t>(i)]);
  }
  const double mine = (p.position(pr.par) - c).norm();
  EXPECT_LE(mine, best + 1e-9);
  int first = 0;
  while (d[static_cast<std::size_t>(first)] > mine + 1e-9) ++first;
  // Every segment has a near-identical shallow minimum; the result must sit
  // in the first one.
  EXPECT_NEAR(pr.par, static_cast<double>(first) / n, 1e-3);
}

TEST(Project, ExactTieGoesToSmallestParameter) {
  // U-turn symmetric about the x axis: the point is equidistant from both arms.
  const ParametricPath p = build_path_from_waypoints({{0, 1, 0}, {2, 1, 0}, {3, 0, 0}, {2, -1, 0}, {0, -1, 0}}, 40);
  const Vec3 x(0.5, 0, 0);
  const PointProjection pr = project_point(p, x);
  EXPECT_LT(pr.par, 0.5);
  EXPECT_GT(p.position(pr.par).y(), 0.0);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 100000; ++i) best = std::min(best, (p.position(i / 100000.0) - x).norm());
  EXPECT_LE((p.position(pr.par) - x).norm(), best + 1e-9);
}

TEST(Project, EndCapsDroppedByDefault) {
  const ParametricPath p = straight();
  const std::vector<Vec3> pts{{1.5, 0.2, 0.0}, {-0.3, 0.0, 0.1}, {0.5, 0.1, 0.0}, {1.0, 0.3, 0.0}};
  const PointProjection cap = project_point(p, pts[0]);
  EXPECT_TRUE(cap.end_cap);
  EXPECT_EQ(cap.par, 1.0);
  EXPECT_NEAR(cap.tangential, 0.5, 1e-12);
  const ProjectedCloud dropped = project_cloud(p, pts);
  ASSERT_EQ(dropped.size(), 2u);
  EXPECT_EQ(dropped.source_index[0], 2u);
  // Exactly at the end with no tangential part is not an end cap.
  EXPECT_EQ(dropped.source_index[1], 3u);
  ProjectionOptions keep;
  keep.keep_end_caps = true;
  const ProjectedCloud kept = project_cloud(p, pts, keep);
  ASSERT_EQ(kept.size(), 4u);
  EXPECT_EQ(kept.end_cap[0], 1);
  EXPECT_EQ(kept.end_cap[1], 1);
  EXPECT_EQ(kept.end_cap[2], 0);
}

TEST(Project, EmptyAndNonFinite) {
  const ParametricPath p = straight();
  EXPECT_TRUE(project_cloud(p, std::vector<Vec3>{}).empty());
  EXPECT_THROW(project_cloud(p, std::vector<Vec3>{{0.5, std::nan(""), 0}}), InputError);
}

TEST(ProjectProperties, ParWithinDomainAndTangentialResidualSmall) {
  const ParametricPath p = wiggle();
  const auto pts = cloud_near(p, 1000, 1.5, 7);
  const ProjectedCloud pc = project_cloud(p, pts);
  for (std::size_t i = 0; i < pc.size(); ++i) {
    EXPECT_GE(pc.par[i], p.domain().lo);
    EXPECT_LE(pc.par[i], p.domain().hi);
    const PointProjection pr = project_point(p, pts[pc.source_index[i]]);
    EXPECT_LE(std::abs(pr.tangential), 1e-6 * p.length());
  }
}

TEST(ProjectProperties, Reconstruction) {
  const ParametricPath p = wiggle();
  const double radius = 1.5;
  const auto pts = cloud_near(p, 2000, radius, 8);
  const ProjectedCloud pc = project_cloud(p, pts);
  ASSERT_EQ(pc.size(), pts.size());
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const FrameStation f = p.eval(pc.par[i]);
    const Vec3 back = f.position + f.rotation * Vec3(0, pc.ortho[i].x(), pc.ortho[i].y());
    EXPECT_LE((back - pts[pc.source_index[i]]).norm(), 1e-5 * radius);
  }
}

TEST(ProjectProperties, LocalOptimality) {
  const ParametricPath p = wiggle();
  const auto pts = cloud_near(p, 200, 1.5, 9);
  std::mt19937_64 rng(10);
  const double w = p.domain().width();
  std::uniform_real_distribution<double> du(-0.05 * w, 0.05 * w);
  for (const auto& x : pts) {
    const PointProjection pr = project_point(p, x);
    const double d0 = (x - p.position(pr.par)).norm();
    for (int k = 0; k < 1000; ++k) {
      const double xi = std::clamp(pr.par + du(rng), p.domain().lo, p.domain().hi);
      EXPECT_GE((x - p.position(xi)).norm(), d0 - 1e-9);
    }
  }
}

TEST(ProjectProperties, PartitionInvariance) {
  const ParametricPath p = wiggle();
  const auto pts = cloud_near(p, 500, 2.0, 11);
  const ProjectedCloud whole = project_cloud(p, pts);
  const std::span<const Vec3> all(pts);
  ProjectedCloud a = project_cloud(p, all.subspan(0, 173));
  const ProjectedCloud b = project_cloud(p, all.subspan(173));
  a.append(b);
  ASSERT_EQ(a.size(), whole.size());
  for (std::size_t i = 0; i < whole.size(); ++i) {
    EXPECT_EQ(a.par[i], whole.par[i]);
    EXPECT_EQ(a.ortho[i], whole.ortho[i]);
  }
}

TEST(Wrapper, RemovesFarPointsAndAppendsShell) {
  ProjectedCloud pc;
  pc.push_back(0.5, Vec2(3, 0), 0);
  pc.push_back(0.5, Vec2(1, 1), 1);
  const ProjectedCloud out = apply_wrapper(pc, WrapperConfig{2.0, 16, 100}, Domain{0, 1});
  ASSERT_EQ(out.size(), 1u + 1600u);
  EXPECT_EQ(out.source_index[0], 1u);
  std::size_t synthetic = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_LE(out.ortho[i].norm(), 2.0 + 1e-12);
    if (out.is_synthetic(i)) {
      ++synthetic;
      EXPECT_NEAR(out.ortho[i].norm(), 2.0, 1e-12);
    }
  }
  EXPECT_EQ(synthetic, 1600u);
}

TEST(Wrapper, EmptyCloudGivesOnlyShell) {
  const ProjectedCloud out = apply_wrapper(ProjectedCloud{}, WrapperConfig{2.0, 16, 100}, Domain{0, 1});
  EXPECT_EQ(out.size(), 1600u);
}

TEST(Wrapper, IdempotentOnRealPoints) {
  const ParametricPath p = wiggle();
  const ProjectedCloud pc = project_cloud(p, cloud_near(p, 500, 3.0, 12));
  const WrapperConfig cfg{1.5, 16, 100};
  const ProjectedCloud once = apply_wrapper(pc, cfg, p);
  ProjectedCloud real;
  for (std::size_t i = 0; i < once.size(); ++i)
    if (!once.is_synthetic(i)) real.push_back(once.par[i], once.ortho[i], once.source_index[i]);
  const ProjectedCloud twice = apply_wrapper(real, cfg, p);
  ProjectedCloud real2;
  for (std::size_t i = 0; i < twice.size(); ++i)
    if (!twice.is_synthetic(i)) real2.push_back(twice.par[i], twice.ortho[i], twice.source_index[i]);
  EXPECT_EQ(real.par, real2.par);
  EXPECT_EQ(real.source_index, real2.source_index);
  EXPECT_EQ(twice.size(), once.size());
}

TEST(Wrapper, ConfigValidation) {
  EXPECT_THROW(apply_wrapper(ProjectedCloud{}, WrapperConfig{0.0, 16, 100}, Domain{0, 1}), InputError);
  EXPECT_THROW(apply_wrapper(ProjectedCloud{}, WrapperConfig{1.0, 7, 100}, Domain{0, 1}), InputError);
}

TEST(SplitPlanar, Examples) {
  ProjectedCloud pc;
  pc.push_back(0.1, Vec2(0.3, 0), 0);
  pc.push_back(0.2, Vec2(-0.5, 0), 1);
  pc.push_back(0.3, Vec2(0.1, 0), 2);
  auto [pos, neg] = split_planar(pc);
  ASSERT_EQ(pos.size(), 2u);
  ASSERT_EQ(neg.size(), 1u);
  EXPECT_EQ(pos.ortho[0].x(), 0.3);
  EXPECT_EQ(pos.ortho[1].x(), 0.1);
  EXPECT_EQ(neg.ortho[0].x(), -0.5);

  ProjectedCloud zero;
  zero.push_back(0.5, Vec2(0.0, 0), 0);
  auto [zp, zn] = split_planar(zero);
  EXPECT_EQ(zp.size(), 1u);
  EXPECT_EQ(zn.size(), 1u);

  auto [ep, en] = split_planar(ProjectedCloud{});
  EXPECT_TRUE(ep.empty());
  EXPECT_TRUE(en.empty());
}

TEST(SplitPlanar, PlanarWrapperLines) {
  ProjectedCloud pc;
  pc.push_back(0.5, Vec2(0.2, 0), 0);
  pc.push_back(0.5, Vec2(-1.5, 0), 1);
  const ProjectedCloud out = apply_planar_wrapper(pc, 1.0, 50, Domain{0, 1});
  EXPECT_EQ(out.size(), 1u + 100u);
}
