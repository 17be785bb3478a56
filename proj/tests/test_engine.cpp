#include <cmath>
#include <memory>
#include <string>

#include <gtest/gtest.h>

#include "corrgen/engine.hpp"
#include "corrgen/io.hpp"

using namespace corrgen;

namespace {

const std::string kFixtures = CORRGEN_FIXTURES;

struct Scene {
  std::shared_ptr<const ParametricPath> path;
  ProjectedCloud projected;
};

Scene load_scene(const std::string& cloud, const std::string& path, double wrapper) {
  Scene s;
  s.path = std::make_shared<const ParametricPath>(load_path(kFixtures + "/" + path));
  const RawCloud raw = load_cloud(kFixtures + "/" + cloud);
  s.projected = apply_wrapper(project_cloud(*s.path, raw), WrapperConfig{wrapper, 16, 100}, *s.path);
  return s;
}

std::shared_ptr<const ParametricPath> straight() {
  return std::make_shared<const ParametricPath>(build_path_from_waypoints({{0, 0, 0}, {1, 0, 0}}, 20));
}

ProblemSpec spec3(int degree, Formulation f = Formulation::DdLp) {
  ProblemSpec s;
  s.degree = degree;
  s.formulation = f;
  return s;
}

Eigen::MatrixXd dense_g(const ConicProgram& p) {
  Eigen::SparseMatrix<double> g(static_cast<Eigen::Index>(p.num_rows()), p.num_vars);
  g.setFromTriplets(p.g.begin(), p.g.end());
  return Eigen::MatrixXd(g);
}

const PrimalDualSolver kSolver;

}  // namespace

TEST(Assembly, CountsForConstantDegree) {
  const auto path = straight();
  const ProjectedCloud wrap = apply_wrapper(ProjectedCloud{}, WrapperConfig{1.0, 16, 100}, *path);
  ASSERT_EQ(wrap.size(), 1600u);
  const Assembled lp = assemble_3d(spec3(0), wrap, path->domain());
  EXPECT_EQ(lp.program.num_vars, 5);
  EXPECT_EQ(lp.point_rows, 1600u);
  EXPECT_EQ(lp.definiteness_rows, 400u);
  EXPECT_EQ(lp.constraint_count(), 2000u);
  const Assembled cone = assemble_3d(spec3(0, Formulation::ExactCone), wrap, path->domain());
  EXPECT_EQ(cone.cone_count, 100u);
  EXPECT_EQ(cone.definiteness_rows, 300u);
  ProblemSpec centered = spec3(0);
  centered.centered = true;
  EXPECT_EQ(assemble_3d(centered, wrap, path->domain()).program.num_equalities(), 2u);
}

TEST(Assembly, PointRowSubstitution) {
  ProjectedCloud one;
  one.push_back(0.3, Vec2(2.0, 0.0), 0);
  const Domain dom{0, 1};
  const Assembled a = assemble_3d(spec3(2), one, dom);
  const Eigen::MatrixXd g = dense_g(a.program);
  const Eigen::VectorXd t = eval_basis_row(2, 0.3, dom);
  const Layout3D lay{2};
  // Row is x^T E x + d^T x >= 1 divided by |x|^2 = 4; stored as h - G x >= 0.
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(-g(0, lay.col(Layout3D::kE11, k)), t[k], 1e-15);
    EXPECT_NEAR(-g(0, lay.col(Layout3D::kE12, k)), 0.0, 1e-15);
    EXPECT_NEAR(-g(0, lay.col(Layout3D::kE22, k)), 0.0, 1e-15);
    EXPECT_NEAR(-g(0, lay.col(Layout3D::kD1, k)), 0.5 * t[k], 1e-15);
    EXPECT_NEAR(-g(0, lay.col(Layout3D::kD2, k)), 0.0, 1e-15);
  }
  EXPECT_NEAR(a.program.h[0], -0.25, 1e-15);
}

TEST(Assembly, SpecValidation) {
  ProblemSpec s = spec3(9);
  s.samples = 39;
  EXPECT_THROW(s.validate(), InputError);
  s.samples = 40;
  EXPECT_NO_THROW(s.validate());
  s.pd_epsilon = 0;
  EXPECT_THROW(s.validate(), InputError);
  EXPECT_THROW(parse_formulation("qp"), InputError);
}

TEST(Solve3D, EmptyCloudIsUnbounded) {
  const auto path = straight();
  EXPECT_THROW(solve_3d(spec3(3), ProjectedCloud{}, kSolver, path), UnboundedProblemError);
  ProblemSpec s2 = spec3(3);
  s2.dimension = 2;
  EXPECT_THROW(solve_2d(s2, ProjectedCloud{}, ProjectedCloud{}, kSolver, path, path->domain()), UnboundedProblemError);
}

TEST(Solve3D, WrapperOnlyGivesDisk) {
  const auto path = straight();
  const ProjectedCloud wrap = apply_wrapper(ProjectedCloud{}, WrapperConfig{2.0, 32, 100}, *path);
  for (Formulation f : {Formulation::DdLp, Formulation::ExactCone}) {
    const Solved3D r = solve_3d(spec3(3, f), wrap, kSolver, path);
    EXPECT_NEAR(r.report.volume, 4 * M_PI, 4 * M_PI * 1e-3) << to_string(f);
  }
}

TEST(Solve3D, FeasibleAndDefinite) {
  const Scene s = load_scene("mixed.csv", "mixed_path.json", 2.0);
  for (Formulation f : {Formulation::DdLp, Formulation::ExactCone}) {
    const ProblemSpec spec = spec3(9, f);
    const Solved3D r = solve_3d(spec, s.projected, kSolver, s.path);
    EXPECT_GE(r.report.min_point_value, -1e-6);
    EXPECT_GE(r.report.min_definiteness, spec.pd_epsilon - 1e-9);
    for (double xi : linspace(0, 1, 500)) {
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Mat2>(r.corridor.matrix(xi)).eigenvalues()[0], 0.0);
    }
  }
}

TEST(Solve3D, DiagonalDominanceImpliesConeFeasibility) {
  const Scene s = load_scene("mixed.csv", "mixed_path.json", 2.0);
  const ProblemSpec spec = spec3(9);
  const Solved3D r = solve_3d(spec, s.projected, kSolver, s.path);
  for (double xi : linspace(s.path->domain().lo, s.path->domain().hi, spec.samples)) {
    const Mat2 e = r.corridor.matrix(xi);
    const double a = e(0, 0) - spec.pd_epsilon;
    const double b = e(1, 1) - spec.pd_epsilon;
    EXPECT_GE(a, -1e-9);
    EXPECT_GE(b, -1e-9);
    EXPECT_GE(a * b - e(0, 1) * e(0, 1), -1e-9);
  }
}

TEST(Solve3D, ObjectiveMonotoneInDegree) {
  const Scene s = load_scene("mixed.csv", "mixed_path.json", 2.0);
  ProblemSpec base = spec3(0);
  base.samples = 64;
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {0, 3, 6, 9, 12, 15}) {
    ProblemSpec spec = base;
    spec.degree = n;
    const double obj = solve_3d(spec, s.projected, kSolver, s.path).report.objective;
    EXPECT_LE(obj, prev + 1e-6 * std::abs(prev)) << n;
    prev = obj;
  }
}

TEST(Solve3D, TranslationEquivariance) {
  const RawCloud raw = load_cloud(kFixtures + "/mixed.csv");
  const Vec3 shift(3.5, -2.0, 7.25);
  RawCloud moved = raw;
  for (auto& p : moved.points) p += shift;
  const auto path_a = std::make_shared<const ParametricPath>(build_path_from_waypoints({{0, 0, 0}, {10, 0, 0}}, 50));
  const auto path_b =
      std::make_shared<const ParametricPath>(build_path_from_waypoints({shift, Vec3(10, 0, 0) + shift}, 50));
  const WrapperConfig wrap{2.0, 16, 100};
  const auto pa = apply_wrapper(project_cloud(*path_a, raw), wrap, *path_a);
  const auto pb = apply_wrapper(project_cloud(*path_b, moved), wrap, *path_b);
  const Solved3D a = solve_3d(spec3(6), pa, kSolver, path_a);
  const Solved3D b = solve_3d(spec3(6), pb, kSolver, path_b);
  EXPECT_NEAR(a.report.objective, b.report.objective, 1e-8 * std::abs(a.report.objective));
  EXPECT_NEAR(a.report.volume, b.report.volume, 1e-6 * a.report.volume);
}

TEST(Solve3D, CenteredNeverBeatsOffCentered) {
  const Scene s = load_scene("cylinder.csv", "offset.json", 2.0);
  ProblemSpec spec = spec3(3);
  const double off = solve_3d(spec, s.projected, kSolver, s.path).report.volume;
  spec.centered = true;
  const Solved3D c = solve_3d(spec, s.projected, kSolver, s.path);
  EXPECT_LE(c.report.volume, off);
  for (double xi : linspace(0, 1, 20)) EXPECT_LT(c.corridor.offset(xi).norm(), 1e-9);
}

TEST(Solve3D, BackendsAgree) {
  const Scene s = load_scene("mixed.csv", "mixed_path.json", 2.0);
  const double a = solve_3d(spec3(6), s.projected, kSolver, s.path).report.objective;
  const double b = solve_3d(spec3(6), s.projected, BarrierSolver(), s.path).report.objective;
  EXPECT_NEAR(a, b, 1e-6 * std::abs(a));
}

TEST(Solve2D, Channel) {
  const auto path = std::make_shared<const ParametricPath>(load_path(kFixtures + "/channel_path.json"));
  const auto [pos, neg] = split_planar(project_cloud(*path, load_cloud(kFixtures + "/channel.csv")));
  ProblemSpec spec;
  spec.dimension = 2;
  spec.degree = 9;
  const Solved2D r = solve_2d(spec, pos, neg, kSolver, path, path->domain());
  for (double xi : linspace(0, 1, 100)) {
    EXPECT_NEAR(r.corridor.b_plus(xi), 0.4, 1e-4);
    EXPECT_NEAR(r.corridor.b_minus(xi), -0.4, 1e-4);
  }
  EXPECT_NEAR(r.report.volume, 0.8, 1e-4);
  EXPECT_GE(r.report.min_point_value, -1e-6);
}

TEST(Solve2D, SinglePointAndEmptyBand) {
  const auto path = straight();
  ProblemSpec spec;
  spec.dimension = 2;
  spec.degree = 0;
  ProjectedCloud one;
  one.push_back(0.5, Vec2(0.2, 0.0), 0);
  const auto sides = split_planar(apply_planar_wrapper(one, 1.0, 100, path->domain()));
  const Solved2D r = solve_2d(spec, sides.first, sides.second, kSolver, path, path->domain());
  EXPECT_NEAR(r.corridor.b_plus(0.5), 0.2, 1e-6);
  EXPECT_NEAR(r.corridor.b_minus(0.5), -1.0, 1e-6);

  const auto none = split_planar(apply_planar_wrapper(ProjectedCloud{}, 1.0, 100, path->domain()));
  const Solved2D e = solve_2d(spec, none.first, none.second, kSolver, path, path->domain());
  EXPECT_NEAR(e.corridor.b_plus(0.1), 1.0, 1e-6);
  EXPECT_NEAR(e.corridor.b_minus(0.9), -1.0, 1e-6);
}

TEST(Sweep, RowsAndOrder) {
  const Scene s = load_scene("mixed.csv", "mixed_path.json", 2.0);
  ProblemSpec base;
  base.samples = 4 * 6;
  const auto rows = degree_sweep(base, s.projected, {3, 4, 5}, {Formulation::DdLp, Formulation::ExactCone}, kSolver,
                                 s.path, s.path->domain(), 2);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_TRUE(rows[i].ok) << rows[i].error;
    EXPECT_EQ(rows[i].degree, 3 + static_cast<int>(i) / 2);
    EXPECT_EQ(rows[i].formulation, i % 2 == 0 ? "dd-lp" : "exact-cone");
    EXPECT_GT(rows[i].volume, 0.0);
  }
  EXPECT_THROW(degree_sweep(base, s.projected, {5, 3}, {Formulation::DdLp}, kSolver, s.path, s.path->domain()),
               InputError);
}
