// corrgen: command-line front end.
//
//   corrgen generate --cloud c.csv --path p.json --degree 6 --wrapper-radius 1.5 --out corridor.json
//   corrgen sweep    --cloud c.csv --path p.json --degrees 3:25 --wrapper-radius 1.5 --out sweep.csv
//   corrgen check    --corridor corridor.json --cloud c.csv
//   corrgen synth    --kind mixed --seed 3 --out-cloud c.csv --out-path p.json
//   corrgen export   --corridor corridor.json --out tube.obj
//
// Exit codes: 0 ok, 1 bad input, 2 solver failure, 3 corridor violations.
// One JSON summary line goes to stdout; everything else goes to stderr.

#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corrgen/corrgen.hpp"

namespace {

using namespace corrgen;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitSolver = 2;
constexpr int kExitViolation = 3;

struct SolveOptions {
  std::string cloud;
  std::string path;
  int dim = 3;
  std::string formulation = "lp";
  std::optional<double> wrapper_radius;
  int wrapper_ring = 16;
  int samples = 100;
  std::optional<double> eigen_min;
  std::optional<double> eigen_max;
  bool centered = false;
  bool include_end_caps = false;
  double pd_epsilon = 1e-6;
  double feas_tol = 1e-6;
  std::string backend = "primal-dual";
  int path_samples = 50;
};

void add_solve_options(CLI::App* cmd, SolveOptions& o) {
  cmd->add_option("--cloud", o.cloud, "Point cloud (CSV x,y,z / x,y or binary)")->required();
  cmd->add_option("--path", o.path, "Reference path JSON (waypoints or stations)")->required();
  cmd->add_option("--dim", o.dim, "Corridor dimension")->check(CLI::IsMember({2, 3}));
  cmd->add_option("--wrapper-radius", o.wrapper_radius, "Wrapper radius in meters (required in 3D without eigen bounds)");
  cmd->add_option("--wrapper-ring", o.wrapper_ring, "Wrapper points per station");
  cmd->add_option("--samples", o.samples, "Discretization samples N");
  cmd->add_option("--eigen-min", o.eigen_min, "Lower eigenvalue bound of E");
  cmd->add_option("--eigen-max", o.eigen_max, "Upper eigenvalue bound of E");
  cmd->add_flag("--centered", o.centered, "Force the offset d to zero");
  cmd->add_flag("--include-end-caps", o.include_end_caps, "Keep points that project onto the path endpoints");
  cmd->add_option("--pd-epsilon", o.pd_epsilon, "Strictness margin");
  cmd->add_option("--feas-tol", o.feas_tol, "Feasibility tolerance");
  cmd->add_option("--backend", o.backend, "Conic backend")->check(CLI::IsMember({"primal-dual", "barrier"}));
  cmd->add_option("--path-samples", o.path_samples, "Stations per waypoint segment");
}

SolverSettings solver_settings() {
  SolverSettings s;
  if (const char* env = std::getenv("CORRGEN_SOLVER_TOL")) {
    char* end = nullptr;
    const double tol = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(tol > 0.0)) throw InputError("CORRGEN_SOLVER_TOL must be a positive number");
    s.tol_rel = tol;
    s.tol_abs = 0.1 * tol;
  }
  return s;
}

std::unique_ptr<ConicBackend> make_backend(const std::string& name) {
  if (name == "barrier") return std::make_unique<BarrierSolver>(solver_settings());
  return std::make_unique<PrimalDualSolver>(solver_settings());
}

struct Prepared {
  std::shared_ptr<const ParametricPath> path;
  ProjectedCloud projected;
  ProblemSpec spec;
};

ProblemSpec make_spec(const SolveOptions& o, int degree) {
  ProblemSpec spec;
  spec.dimension = o.dim;
  spec.degree = degree;
  spec.samples = o.samples;
  spec.formulation = parse_formulation(o.formulation);
  spec.pd_epsilon = o.pd_epsilon;
  spec.feas_tol = o.feas_tol;
  spec.centered = o.centered;
  if (o.eigen_min || o.eigen_max) {
    if (!o.eigen_min || !o.eigen_max) throw InputError("--eigen-min and --eigen-max must be given together");
    spec.eigen_bounds = EigenBoundConfig{*o.eigen_min, *o.eigen_max};
  }
  return spec;
}

Prepared prepare(const SolveOptions& o, int degree) {
  Prepared p;
  p.spec = make_spec(o, degree);
  if (o.dim == 3 && !o.wrapper_radius && !p.spec.eigen_bounds) {
    throw InputError("--wrapper-radius is required for --dim 3 unless --eigen-min/--eigen-max are given");
  }
  const RawCloud cloud = load_cloud(o.cloud);
  if (o.dim == 3 && cloud.planar) throw InputError("planar (x,y) cloud given for a 3D corridor");
  p.path = std::make_shared<const ParametricPath>(load_path(o.path, o.path_samples));
  ProjectionOptions popts;
  popts.keep_end_caps = o.include_end_caps;
  p.projected = project_cloud(*p.path, cloud, popts);
  std::cerr << "projected " << p.projected.size() << " of " << cloud.size() << " points\n";
  if (o.wrapper_radius) {
    if (o.dim == 3) {
      p.projected = apply_wrapper(p.projected, WrapperConfig{*o.wrapper_radius, o.wrapper_ring, o.samples}, *p.path);
    } else {
      p.projected = apply_planar_wrapper(p.projected, *o.wrapper_radius, o.samples, p.path->domain());
    }
    std::cerr << "after wrapper: " << p.projected.size() << " constraint points\n";
  }
  return p;
}

int cmd_generate(const SolveOptions& o, int degree, const std::string& out, const std::string& mesh, int mesh_stations,
                 int mesh_ring) {
  const Prepared p = prepare(o, degree);
  const auto backend = make_backend(o.backend);
  SolveReport report;
  AnyCorridor corridor;
  if (o.dim == 3) {
    auto solved = solve_3d(p.spec, p.projected, *backend, p.path);
    report = solved.report;
    corridor = std::move(solved.corridor);
  } else {
    const auto sides = split_planar(p.projected);
    auto solved = solve_2d(p.spec, sides.first, sides.second, *backend, p.path, p.path->domain());
    report = solved.report;
    corridor = std::move(solved.corridor);
  }
  save_corridor(out, corridor);
  if (!mesh.empty()) {
    const TriangleMesh m = std::holds_alternative<Corridor3D>(corridor)
                               ? sample_boundary_mesh(std::get<Corridor3D>(corridor), mesh_stations, mesh_ring)
                               : sample_boundary_mesh(std::get<Corridor2D>(corridor), mesh_stations);
    save_obj(mesh, m);
  }
  Json line = report_to_json(report);
  line["out"] = out;
  std::cout << line.dump() << std::endl;
  return kExitOk;
}

std::vector<int> parse_degrees(const std::string& s) {
  std::vector<int> out;
  const auto to_int = [&](const std::string& t) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size() || t.empty() || v < 0) throw InputError("bad --degrees value '" + s + "'");
    return v;
  };
  if (const auto colon = s.find(':'); colon != std::string::npos) {
    const int lo = to_int(s.substr(0, colon));
    const int hi = to_int(s.substr(colon + 1));
    if (hi < lo) throw InputError("--degrees range must be ascending");
    for (int d = lo; d <= hi; ++d) out.push_back(d);
  } else {
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(to_int(tok));
  }
  if (out.empty()) throw InputError("--degrees is empty");
  return out;
}

int cmd_sweep(SolveOptions o, const std::string& degrees_arg, const std::string& formulations_arg, const std::string& out,
              int jobs) {
  const std::vector<int> degrees = parse_degrees(degrees_arg);
  std::vector<Formulation> forms;
  {
    std::stringstream ss(formulations_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) forms.push_back(parse_formulation(tok));
  }
  // One N for the whole sweep so rows stay comparable.
  const int need = 4 * (degrees.back() + 1);
  if (o.samples < need) {
    std::cerr << "raising samples from " << o.samples << " to " << need << " for degree " << degrees.back() << "\n";
    o.samples = need;
  }
  const Prepared p = prepare(o, degrees.front());
  const auto backend = make_backend(o.backend);
  const auto rows = degree_sweep(p.spec, p.projected, degrees, forms, *backend, p.path, p.path->domain(), jobs);
  {
    std::ofstream f(out);
    if (!f) throw InputError("cannot open '" + out + "' for writing");
    write_sweep_csv(f, rows);
  }
  std::size_t ok = 0;
  for (const auto& r : rows) {
    if (r.ok) {
      ++ok;
    } else {
      std::cerr << "degree " << r.degree << " " << r.formulation << " failed: " << r.error << "\n";
    }
  }
  std::cout << Json{{"rows", rows.size()}, {"ok", ok}, {"samples", o.samples}, {"out", out}}.dump() << std::endl;
  return ok > 0 ? kExitOk : kExitSolver;
}

int cmd_check(const std::string& corridor_file, const std::string& cloud_file, const std::string& path_file,
              double feas_tol, bool include_end_caps) {
  const AnyCorridor corridor = load_corridor(corridor_file);
  const RawCloud cloud = load_cloud(cloud_file);
  const int dim = corridor_dim(corridor);
  bool flat = true;
  for (const auto& pt : cloud.points) flat = flat && pt.z() == 0.0;
  if (dim == 3 && cloud.planar) throw InputError("dimension mismatch: 3D corridor, planar (x,y) cloud");
  if (dim == 2 && !flat) throw InputError("dimension mismatch: 2D corridor, cloud has nonzero z");

  std::shared_ptr<const ParametricPath> path =
      std::visit([](const auto& c) { return c.path; }, corridor);
  if (!path_file.empty()) path = std::make_shared<const ParametricPath>(load_path(path_file));
  if (!path) throw InputError("corridor has no embedded path; pass --path");

  ProjectionOptions popts;
  popts.keep_end_caps = include_end_caps;
  const ProjectedCloud pc = project_cloud(*path, cloud, popts);
  double min_value = std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
  for (std::size_t i = 0; i < pc.size(); ++i) {
    double v = 0.0;
    if (dim == 3) {
      v = eval_inequality(std::get<Corridor3D>(corridor), pc.par[i], pc.ortho[i]);
    } else {
      // Distance to the band edge on the point's side, positive outside.
      const auto& c2 = std::get<Corridor2D>(corridor);
      const double x = pc.ortho[i][0];
      v = std::numeric_limits<double>::infinity();
      if (x >= 0.0) v = std::min(v, x - c2.b_plus(pc.par[i]));
      if (x <= 0.0) v = std::min(v, c2.b_minus(pc.par[i]) - x);
    }
    min_value = std::min(min_value, v);
    if (v < -feas_tol) ++violations;
  }
  Json line{{"points", pc.size()}, {"violations", violations}, {"feas_tol", feas_tol}};
  line["min_value"] = std::isfinite(min_value) ? Json(min_value) : Json(nullptr);
  std::cout << line.dump() << std::endl;
  if (violations > 0) {
    std::cerr << violations << " point(s) inside the corridor\n";
    return kExitViolation;
  }
  return kExitOk;
}

struct SynthOptions {
  std::string kind;
  std::uint64_t seed = 0;
  std::optional<int> count;
  std::optional<int> density;
  std::optional<double> radius;
  double length = 1.0;
  std::vector<double> path_offset{0.0, 0.0};
  std::string out_cloud;
  std::string out_path;
  bool binary = false;
};

int cmd_synth(const SynthOptions& o) {
  const SceneKind kind = parse_scene_kind(o.kind);
  SceneSpec spec;
  if (kind == SceneKind::Cylinder) {
    spec = SceneSpec::cylinder(o.radius.value_or(1.0), o.count.value_or(50), o.density.value_or(64), o.length);
  } else if (kind == SceneKind::Channel) {
    spec = SceneSpec::channel(o.radius.value_or(0.4), o.density.value_or(200), o.length);
  } else {
    spec.kind = kind;
    if (o.count) spec.count = *o.count;
    if (o.density) spec.density = *o.density;
  }
  spec.seed = o.seed;
  RawCloud cloud = generate_scene(spec);
  if (kind == SceneKind::Channel) cloud.planar = true;
  if (o.binary) {
    save_cloud_binary(o.out_cloud, cloud);
  } else {
    save_cloud_csv(o.out_cloud, cloud);
  }
  if (!o.out_path.empty()) {
    auto [a, b] = spec.path_endpoints();
    if (o.path_offset.size() != 2) throw InputError("--path-offset takes two numbers (y z)");
    const Vec3 shift(0.0, o.path_offset[0], o.path_offset[1]);
    save_waypoints(o.out_path, {a + shift, b + shift});
  }
  std::cout << Json{{"kind", to_string(kind)}, {"seed", o.seed}, {"points", cloud.size()}, {"out_cloud", o.out_cloud}}.dump()
            << std::endl;
  return kExitOk;
}

int cmd_export(const std::string& corridor_file, const std::string& path_file, const std::string& out, int stations,
               int ring) {
  AnyCorridor corridor = load_corridor(corridor_file);
  if (!path_file.empty()) {
    auto path = std::make_shared<const ParametricPath>(load_path(path_file));
    std::visit([&](auto& c) { c.path = path; }, corridor);
  }
  const TriangleMesh m = std::holds_alternative<Corridor3D>(corridor)
                             ? sample_boundary_mesh(std::get<Corridor3D>(corridor), stations, ring)
                             : sample_boundary_mesh(std::get<Corridor2D>(corridor), stations);
  save_obj(out, m);
  std::cout << Json{{"vertices", m.vertices.size()}, {"triangles", m.triangles.size()}, {"out", out}}.dump() << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smooth collision-free corridors around a reference path through a point cloud"};
  app.require_subcommand(1);

  SolveOptions gen_opts;
  int gen_degree = 6;
  std::string gen_out;
  std::string gen_mesh;
  int mesh_stations = 100;
  int mesh_ring = 32;
  auto* gen = app.add_subcommand("generate", "Solve one corridor");
  add_solve_options(gen, gen_opts);
  gen->add_option("--degree", gen_degree, "Polynomial degree n")->check(CLI::NonNegativeNumber);
  gen->add_option("--formulation", gen_opts.formulation, "lp (diagonal dominance) or cone (exact)");
  gen->add_option("--out", gen_out, "Corridor JSON output")->required();
  gen->add_option("--mesh", gen_mesh, "Optional OBJ mesh output");
  gen->add_option("--mesh-stations", mesh_stations, "Mesh stations");
  gen->add_option("--mesh-ring", mesh_ring, "Mesh points per ring");

  SolveOptions sweep_opts;
  std::string degrees = "3:15";
  std::string formulations = "lp,cone";
  std::string sweep_out;
  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Solve across polynomial degrees");
  add_solve_options(sweep, sweep_opts);
  sweep->add_option("--degrees", degrees, "Range a:b or list a,b,c");
  sweep->add_option("--formulations", formulations, "Comma list of lp, cone");
  sweep->add_option("--out", sweep_out, "Sweep CSV output")->required();
  sweep->add_option("--jobs", jobs, "Rows solved concurrently")->check(CLI::PositiveNumber);

  std::string chk_corridor;
  std::string chk_cloud;
  std::string chk_path;
  double chk_tol = 1e-6;
  bool chk_caps = false;
  auto* check = app.add_subcommand("check", "Verify that no cloud point lies inside a corridor");
  check->add_option("--corridor", chk_corridor, "Corridor JSON")->required();
  check->add_option("--cloud", chk_cloud, "Point cloud")->required();
  check->add_option("--path", chk_path, "Reference path (defaults to the embedded one)");
  check->add_option("--feas-tol", chk_tol, "Violation threshold");
  check->add_flag("--include-end-caps", chk_caps, "Also test end-cap points");

  SynthOptions syn;
  auto* synth = app.add_subcommand("synth", "Write a synthetic scene and its straight reference path");
  synth->add_option("--kind", syn.kind, "columns, rings, mixed, channel or cylinder")->required();
  synth->add_option("--seed", syn.seed, "PRNG seed");
  synth->add_option("--count", syn.count, "Obstacles (rings for the cylinder)");
  synth->add_option("--density", syn.density, "Points per obstacle, ring or wall");
  synth->add_option("--radius", syn.radius, "Cylinder radius or channel half-width");
  synth->add_option("--length", syn.length, "Cylinder or channel length");
  synth->add_option("--path-offset", syn.path_offset, "Transverse path offset (y z)")->expected(2);
  synth->add_option("--out-cloud", syn.out_cloud, "Cloud output")->required();
  synth->add_option("--out-path", syn.out_path, "Path JSON output");
  synth->add_flag("--binary", syn.binary, "Write the binary cloud format");

  std::string exp_corridor;
  std::string exp_path;
  std::string exp_out;
  int exp_stations = 100;
  int exp_ring = 32;
  auto* exp = app.add_subcommand("export", "Corridor surface as a Wavefront OBJ mesh");
  exp->add_option("--corridor", exp_corridor, "Corridor JSON")->required();
  exp->add_option("--path", exp_path, "Reference path (defaults to the embedded one)");
  exp->add_option("--out", exp_out, "OBJ output")->required();
  exp->add_option("--stations", exp_stations, "Mesh stations");
  exp->add_option("--ring", exp_ring, "Mesh points per ring");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*gen) return cmd_generate(gen_opts, gen_degree, gen_out, gen_mesh, mesh_stations, mesh_ring);
    if (*sweep) return cmd_sweep(sweep_opts, degrees, formulations, sweep_out, jobs);
    if (*check) return cmd_check(chk_corridor, chk_cloud, chk_path, chk_tol, chk_caps);
    if (*synth) return cmd_synth(syn);
    if (*exp) return cmd_export(exp_corridor, exp_path, exp_out, exp_stations, exp_ring);
  } catch (const SolveFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cout << report_to_json(e.report()).dump() << std::endl;
    return kExitSolver;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    // Malformed JSON content surfaces as json type errors.
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
