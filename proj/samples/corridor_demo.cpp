// Library use without the CLI: curved path through rings of points.
#include <cstdio>
#include <memory>

#include "corrgen/corrgen.hpp"

using namespace corrgen;

int main() {
  auto path = std::make_shared<const ParametricPath>(
      build_path_from_waypoints({{0, 0, 0}, {4, 1, 0}, {8, 0, 1}, {12, -1, 1}}, 40));

  // Obstacles: a ring of radius 1.2 around the path every 0.5 units of xi.
  RawCloud cloud;
  const Domain dom = path->domain();
  for (double xi : linspace(dom.lo, dom.hi, 2 * static_cast<int>(dom.hi - dom.lo))) {
    const FrameStation f = path->eval(xi);
    for (int k = 0; k < 48; ++k) {
      const double a = 2 * M_PI * k / 48;
      cloud.points.push_back(f.position + f.rotation * Vec3(0, 1.2 * std::cos(a), 0.8 * std::sin(a)));
    }
  }

  const ProjectedCloud projected = apply_wrapper(project_cloud(*path, cloud), WrapperConfig{2.0, 16, 100}, *path);
  const PrimalDualSolver solver;
  for (Formulation f : {Formulation::DdLp, Formulation::ExactCone}) {
    ProblemSpec spec;
    spec.degree = 9;
    spec.formulation = f;
    const Solved3D r = solve_3d(spec, projected, solver, path);
    std::printf("%-10s volume %.6f  min point value %.3g  %.1f ms\n", to_string(f), r.report.volume,
                r.report.min_point_value, r.report.assembly_ms + r.report.solve_ms);
    const EllipseSlice mid = recover_ellipse(r.corridor, 0.5 * (dom.lo + dom.hi));
    std::printf("           mid slice axes %.4f %.4f  center (%.4f, %.4f)\n", mid.semi_axes[0], mid.semi_axes[1],
                mid.center.x(), mid.center.y());
  }
  return 0;
}
