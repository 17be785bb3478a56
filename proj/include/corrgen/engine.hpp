#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "corrgen/chebyshev.hpp"
#include "corrgen/conic.hpp"
#include "corrgen/corridor.hpp"
#include "corrgen/error.hpp"
#include "corrgen/path.hpp"
#include "corrgen/projection.hpp"

namespace corrgen {

enum class Formulation {
  // Diagonal dominance of E - eps I: linear rows only.
  DdLp,
  // E - eps I in a rotated quadratic cone; exact for the 2x2 LMI.
  ExactCone,
};

inline const char* to_string(Formulation f) { return f == Formulation::DdLp ? "dd-lp" : "exact-cone"; }

inline Formulation parse_formulation(const std::string& s) {
  if (s == "lp" || s == "dd-lp" || s == "ddlp") return Formulation::DdLp;
  if (s == "cone" || s == "exact-cone" || s == "sdp" || s == "socp") return Formulation::ExactCone;
  throw InputError("unknown formulation '" + s + "' (expected lp or cone)");
}

/// Optional eigenvalue window for E(xi_i): lambda_min I <= E <= lambda_max I.
struct EigenBoundConfig {
  double lambda_min = 0.0;
  double lambda_max = 0.0;

  void validate() const {
    if (!(lambda_min > 0.0) || !(lambda_min <= lambda_max) || !std::isfinite(lambda_max)) {
      throw InputError("eigenvalue bounds need 0 < lambda_min <= lambda_max");
    }
  }
};

struct ProblemSpec {
  int dimension = 3;
  int degree = 6;
  // Discretization samples xi_i, uniform over the domain with endpoints.
  int samples = 100;
  Formulation formulation = Formulation::DdLp;
  // Margin realizing the strict inequalities.
  double pd_epsilon = 1e-6;
  std::optional<EigenBoundConfig> eigen_bounds;
  double feas_tol = 1e-6;
  // Force d(xi) = 0 (ellipse centered on the path).
  bool centered = false;
  // Quadrature samples for the reported volume or area.
  int volume_samples = 1001;

  void validate() const {
    if (dimension != 2 && dimension != 3) throw InputError("dimension must be 2 or 3");
    if (degree < 0) throw InputError("degree must be non-negative");
    if (samples < 4 * (degree + 1)) {
      throw InputError("samples must be at least 4 * (degree + 1) = " + std::to_string(4 * (degree + 1)));
    }
    if (!(pd_epsilon > 0.0)) throw InputError("pd_epsilon must be positive");
    if (!(feas_tol >= 0.0)) throw InputError("feas_tol must be non-negative");
    if (volume_samples < 2) throw InputError("volume_samples must be at least 2");
    if (eigen_bounds) eigen_bounds->validate();
  }
};

/// Column layout of the 3D decision vector: five coefficient blocks
/// (e11, e12, e22, d1, d2), each degree + 1 long.
struct Layout3D {
  int degree = 0;
  enum Block { kE11 = 0, kE12 = 1, kE22 = 2, kD1 = 3, kD2 = 4 };
  int width() const { return degree + 1; }
  int num_vars() const { return 5 * width(); }
  int col(Block b, int k) const { return static_cast<int>(b) * width() + k; }
};

struct Assembled {
  ConicProgram program;
  std::size_t point_rows = 0;
  std::size_t definiteness_rows = 0;
  std::size_t cone_count = 0;
  std::optional<Eigen::VectorXd> warm_start;

  std::size_t constraint_count() const { return program.num_rows(); }
};

struct SolveReport {
  std::string status = "numerical-failure";
  double objective = std::numeric_limits<double>::quiet_NaN();
  // Volume (3D) or area (2D).
  double volume = std::numeric_limits<double>::quiet_NaN();
  double solve_ms = 0.0;
  double assembly_ms = 0.0;
  std::size_t constraints = 0;
  std::size_t points = 0;
  std::string formulation;
  int degree = 0;
  int dimension = 3;
  // Smallest corridor inequality value over the constrained points, in the
  // unscaled form (>= -feas_tol when collision-free).
  double min_point_value = std::numeric_limits<double>::quiet_NaN();
  // Smallest eigenvalue of E at the samples (3D) or smallest
  // min(b_plus, -b_minus) at the samples (2D).
  double min_definiteness = std::numeric_limits<double>::quiet_NaN();
  double gap_bound = std::numeric_limits<double>::quiet_NaN();
  int newton_steps = 0;
  std::string message;
};

/// Solver did not return an optimal point; carries the diagnostics.
class SolveFailure : public SolverError {
 public:
  SolveFailure(const std::string& what, SolveReport report) : SolverError(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

struct Solved3D {
  Corridor3D corridor;
  SolveReport report;
};

struct Solved2D {
  Corridor2D corridor;
  SolveReport report;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

inline std::vector<std::pair<int, double>> block_row(const Layout3D& lay, Layout3D::Block b, const Eigen::VectorXd& basis,
                                                     double scale) {
  std::vector<std::pair<int, double>> row;
  row.reserve(static_cast<std::size_t>(basis.size()));
  for (int k = 0; k < basis.size(); ++k) row.emplace_back(lay.col(b, k), scale * basis[k]);
  return row;
}

inline std::vector<std::pair<int, double>> concat(std::vector<std::pair<int, double>> a,
                                                  const std::vector<std::pair<int, double>>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline ChebyshevPoly poly_from(const Eigen::VectorXd& x, int offset, int width, const Domain& dom) {
  std::vector<double> c(static_cast<std::size_t>(width));
  for (int k = 0; k < width; ++k) c[k] = x[offset + k];
  return ChebyshevPoly(std::move(c), dom);
}

}  // namespace detail

/// Builds the 3D volume-maximization program over the retained points.
///
///   minimize   sum_i tr E(xi_i)
///   subject to x_j^T E(par_j) x_j + d(par_j)^T x_j >= 1   for each point
///              E(xi_i) - eps I  diagonally dominant        (dd-lp)
///              (E11 - eps, E22 - eps, sqrt2 E12) in RQ      (exact-cone)
///
/// Point rows are divided by max(1, |x_j|^2).
inline Assembled assemble_3d(const ProblemSpec& spec, const ProjectedCloud& projected, const Domain& domain) {
  spec.validate();
  if (spec.dimension != 3) throw InputError("assemble_3d needs a 3D problem spec");
  if (projected.empty() && !spec.eigen_bounds) {
    throw UnboundedProblemError("no points, no wrapper and no eigenvalue bounds: the corridor would be unbounded");
  }
  const Layout3D lay{spec.degree};
  const int w = lay.width();
  Assembled out;
  out.program = ConicProgram(lay.num_vars());
  ConicProgram& prog = out.program;

  const auto grid = linspace(domain.lo, domain.hi, spec.samples);
  Eigen::VectorXd sum_basis = Eigen::VectorXd::Zero(w);
  std::vector<Eigen::VectorXd> grid_rows;
  grid_rows.reserve(grid.size());
  for (double xi : grid) {
    grid_rows.push_back(eval_basis_row(spec.degree, xi, domain));
    sum_basis += grid_rows.back();
  }
  prog.objective.segment(lay.col(Layout3D::kE11, 0), w) = sum_basis;
  prog.objective.segment(lay.col(Layout3D::kE22, 0), w) = sum_basis;

  double min_r2 = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < projected.size(); ++j) {
    const Vec2& x = projected.ortho[j];
    const double r2 = x.squaredNorm();
    min_r2 = std::min(min_r2, r2);
    const double scale = 1.0 / std::max(1.0, r2);
    const Eigen::VectorXd t = eval_basis_row(spec.degree, projected.par[j], domain);
    std::vector<std::pair<int, double>> row;
    row.reserve(static_cast<std::size_t>(5 * w));
    for (int k = 0; k < w; ++k) {
      const double tk = t[k] * scale;
      row.emplace_back(lay.col(Layout3D::kE11, k), x.x() * x.x() * tk);
      row.emplace_back(lay.col(Layout3D::kE12, k), 2.0 * x.x() * x.y() * tk);
      row.emplace_back(lay.col(Layout3D::kE22, k), x.y() * x.y() * tk);
      row.emplace_back(lay.col(Layout3D::kD1, k), x.x() * tk);
      row.emplace_back(lay.col(Layout3D::kD2, k), x.y() * tk);
    }
    prog.add_greater_equal(row, scale);
  }
  out.point_rows = projected.size();

  const double lower = spec.eigen_bounds ? std::max(spec.pd_epsilon, spec.eigen_bounds->lambda_min) : spec.pd_epsilon;
  const double sqrt2 = std::sqrt(2.0);
  const std::size_t rows_before = prog.num_rows();
  for (const auto& t : grid_rows) {
    const auto r11 = detail::block_row(lay, Layout3D::kE11, t, 1.0);
    const auto r22 = detail::block_row(lay, Layout3D::kE22, t, 1.0);
    const auto r12 = detail::block_row(lay, Layout3D::kE12, t, 1.0);
    const auto r12n = detail::block_row(lay, Layout3D::kE12, t, -1.0);
    if (spec.formulation == Formulation::DdLp) {
      prog.add_greater_equal(detail::concat(r11, r12n), lower);
      prog.add_greater_equal(detail::concat(r11, r12), lower);
      prog.add_greater_equal(detail::concat(r22, r12n), lower);
      prog.add_greater_equal(detail::concat(r22, r12), lower);
    } else {
      prog.add_rotated_cone({r11, r22, detail::block_row(lay, Layout3D::kE12, t, sqrt2)}, {-lower, -lower, 0.0});
      ++out.cone_count;
    }
    if (spec.eigen_bounds) {
      const double upper = spec.eigen_bounds->lambda_max;
      const auto n11 = detail::block_row(lay, Layout3D::kE11, t, -1.0);
      const auto n22 = detail::block_row(lay, Layout3D::kE22, t, -1.0);
      // Trace window.
      prog.add_greater_equal(detail::concat(r11, r22), 2.0 * lower);
      prog.add_greater_equal(detail::concat(n11, n22), -2.0 * upper);
      if (spec.formulation == Formulation::DdLp) {
        prog.add_greater_equal(detail::concat(n11, r12n), -upper);
        prog.add_greater_equal(detail::concat(n11, r12), -upper);
        prog.add_greater_equal(detail::concat(n22, r12n), -upper);
        prog.add_greater_equal(detail::concat(n22, r12), -upper);
      } else {
        prog.add_rotated_cone({n11, n22, detail::block_row(lay, Layout3D::kE12, t, sqrt2)}, {upper, upper, 0.0});
        ++out.cone_count;
      }
    }
  }
  out.definiteness_rows = prog.num_rows() - rows_before;

  if (spec.centered) {
    for (int k = 0; k < w; ++k) {
      prog.add_equality({{lay.col(Layout3D::kD1, k), 1.0}}, 0.0);
      prog.add_equality({{lay.col(Layout3D::kD2, k), 1.0}}, 0.0);
    }
  }

  // E = alpha I, d = 0 is strictly feasible when every point is off the
  // path and alpha fits inside the eigenvalue window.
  double alpha = std::max(2.0 * lower, 2.0);
  if (!projected.empty()) alpha = std::max(alpha, 2.0 / min_r2);
  const bool window_ok = !spec.eigen_bounds || alpha < spec.eigen_bounds->lambda_max;
  if (min_r2 > 0.0 && std::isfinite(alpha) && window_ok) {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(lay.num_vars());
    x0[lay.col(Layout3D::kE11, 0)] = alpha;
    x0[lay.col(Layout3D::kE22, 0)] = alpha;
    out.warm_start = x0;
  }
  return out;
}

inline Corridor3D corridor_from_solution(const Eigen::VectorXd& x, int degree, const Domain& domain,
                                         std::shared_ptr<const ParametricPath> path) {
  const Layout3D lay{degree};
  const int w = lay.width();
  return Corridor3D{detail::poly_from(x, lay.col(Layout3D::kE11, 0), w, domain),
                    detail::poly_from(x, lay.col(Layout3D::kE12, 0), w, domain),
                    detail::poly_from(x, lay.col(Layout3D::kE22, 0), w, domain),
                    detail::poly_from(x, lay.col(Layout3D::kD1, 0), w, domain),
                    detail::poly_from(x, lay.col(Layout3D::kD2, 0), w, domain),
                    std::move(path)};
}

/// Smallest corridor inequality value over the points (unscaled).
inline double min_point_value(const Corridor3D& c, const ProjectedCloud& projected) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < projected.size(); ++j) {
    m = std::min(m, eval_inequality(c, projected.par[j], projected.ortho[j]));
  }
  return m;
}

/// Smallest eigenvalue of E over the discretization samples.
inline double min_sample_eigenvalue(const Corridor3D& c, int samples) {
  double m = std::numeric_limits<double>::infinity();
  for (double xi : linspace(c.domain().lo, c.domain().hi, samples)) {
    m = std::min(m, Eigen::SelfAdjointEigenSolver<Mat2>(c.matrix(xi), Eigen::EigenvaluesOnly).eigenvalues()[0]);
  }
  return m;
}

inline Solved3D solve_3d(const ProblemSpec& spec, const ProjectedCloud& projected, const ConicBackend& backend,
                         std::shared_ptr<const ParametricPath> path, const Domain& domain) {
  const auto t0 = detail::Clock::now();
  const Assembled asm3 = assemble_3d(spec, projected, domain);
  SolveReport rep;
  rep.assembly_ms = detail::elapsed_ms(t0);
  rep.constraints = asm3.constraint_count();
  rep.points = projected.size();
  rep.formulation = spec.centered ? std::string(to_string(spec.formulation)) + "-centered" : to_string(spec.formulation);
  rep.degree = spec.degree;
  rep.dimension = 3;

  const auto t1 = detail::Clock::now();
  const ConicSolution sol = backend.solve(asm3.program, asm3.warm_start ? &*asm3.warm_start : nullptr);
  rep.solve_ms = detail::elapsed_ms(t1);
  rep.status = to_string(sol.status);
  rep.objective = sol.objective;
  rep.gap_bound = sol.gap_bound;
  rep.newton_steps = sol.newton_steps;
  rep.message = sol.message;
  if (sol.status != SolveStatus::Optimal) {
    throw SolveFailure("3D corridor solve failed: " + rep.status + " (" + sol.message + ")", rep);
  }

  Corridor3D corridor = corridor_from_solution(sol.x, spec.degree, domain, std::move(path));
  rep.min_point_value = projected.empty() ? std::numeric_limits<double>::infinity() : min_point_value(corridor, projected);
  rep.min_definiteness = min_sample_eigenvalue(corridor, spec.samples);
  rep.volume = corridor_volume(corridor, spec.volume_samples);
  return {std::move(corridor), rep};
}

inline Solved3D solve_3d(const ProblemSpec& spec, const ProjectedCloud& projected, const ConicBackend& backend,
                         std::shared_ptr<const ParametricPath> path) {
  const Domain dom = detail::require_path(path).domain();
  return solve_3d(spec, projected, backend, std::move(path), dom);
}

/// Builds the planar band program over the two sides of the path.
///
///   minimize   -sum_i b_plus(xi_i) + sum_i b_minus(xi_i)
///   subject to b_plus(xi_i) >= eps, b_minus(xi_i) <= -eps
///              b_plus(par) <= x   for positive-side points
///              b_minus(par) >= x  for negative-side points
///
/// Variables: b_plus coefficients then b_minus coefficients.
inline Assembled assemble_2d(const ProblemSpec& spec, const ProjectedCloud& positive, const ProjectedCloud& negative,
                             const Domain& domain, int axis = 0) {
  spec.validate();
  if (spec.dimension != 2) throw InputError("assemble_2d needs a 2D problem spec");
  if (positive.empty() && negative.empty()) {
    throw UnboundedProblemError("no points and no wrapper: the planar corridor would be unbounded");
  }
  const int w = spec.degree + 1;
  Assembled out;
  out.program = ConicProgram(2 * w);
  ConicProgram& prog = out.program;
  auto plus_row = [&](const Eigen::VectorXd& t, double s) {
    std::vector<std::pair<int, double>> r;
    for (int k = 0; k < w; ++k) r.emplace_back(k, s * t[k]);
    return r;
  };
  auto minus_row = [&](const Eigen::VectorXd& t, double s) {
    std::vector<std::pair<int, double>> r;
    for (int k = 0; k < w; ++k) r.emplace_back(w + k, s * t[k]);
    return r;
  };

  const auto grid = linspace(domain.lo, domain.hi, spec.samples);
  for (double xi : grid) {
    const Eigen::VectorXd t = eval_basis_row(spec.degree, xi, domain);
    prog.objective.head(w) -= t;
    prog.objective.tail(w) += t;
  }

  double min_pos = std::numeric_limits<double>::infinity();
  double max_neg = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < positive.size(); ++j) {
    const double v = positive.ortho[j][axis];
    min_pos = std::min(min_pos, v);
    prog.add_greater_equal(plus_row(eval_basis_row(spec.degree, positive.par[j], domain), -1.0), -v);
  }
  for (std::size_t j = 0; j < negative.size(); ++j) {
    const double v = negative.ortho[j][axis];
    max_neg = std::max(max_neg, v);
    prog.add_greater_equal(minus_row(eval_basis_row(spec.degree, negative.par[j], domain), 1.0), v);
  }
  out.point_rows = positive.size() + negative.size();

  const std::size_t before = prog.num_rows();
  for (double xi : grid) {
    const Eigen::VectorXd t = eval_basis_row(spec.degree, xi, domain);
    prog.add_greater_equal(plus_row(t, 1.0), spec.pd_epsilon);
    prog.add_greater_equal(minus_row(t, -1.0), spec.pd_epsilon);
  }
  out.definiteness_rows = prog.num_rows() - before;

  // Constant bounds halfway to the nearest obstacle on each side.
  const double bp = std::isfinite(min_pos) ? 0.5 * min_pos : 1.0;
  const double bm = std::isfinite(max_neg) ? 0.5 * max_neg : -1.0;
  if (bp > 2.0 * spec.pd_epsilon && bm < -2.0 * spec.pd_epsilon) {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2 * w);
    x0[0] = bp;
    x0[w] = bm;
    out.warm_start = x0;
  }
  return out;
}

inline Solved2D solve_2d(const ProblemSpec& spec, const ProjectedCloud& positive, const ProjectedCloud& negative,
                         const ConicBackend& backend, std::shared_ptr<const ParametricPath> path, const Domain& domain,
                         int axis = 0) {
  const auto t0 = detail::Clock::now();
  const Assembled asm2 = assemble_2d(spec, positive, negative, domain, axis);
  SolveReport rep;
  rep.assembly_ms = detail::elapsed_ms(t0);
  rep.constraints = asm2.constraint_count();
  rep.points = positive.size() + negative.size();
  rep.formulation = "planar-lp";
  rep.degree = spec.degree;
  rep.dimension = 2;

  const auto t1 = detail::Clock::now();
  const ConicSolution sol = backend.solve(asm2.program, asm2.warm_start ? &*asm2.warm_start : nullptr);
  rep.solve_ms = detail::elapsed_ms(t1);
  rep.status = to_string(sol.status);
  rep.objective = sol.objective;
  rep.gap_bound = sol.gap_bound;
  rep.newton_steps = sol.newton_steps;
  rep.message = sol.message;
  if (sol.status != SolveStatus::Optimal) {
    throw SolveFailure("2D corridor solve failed: " + rep.status + " (" + sol.message + ")", rep);
  }

  const int w = spec.degree + 1;
  Corridor2D corridor{detail::poly_from(sol.x, 0, w, domain), detail::poly_from(sol.x, w, w, domain), std::move(path)};
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < positive.size(); ++j) m = std::min(m, positive.ortho[j][axis] - corridor.b_plus(positive.par[j]));
  for (std::size_t j = 0; j < negative.size(); ++j) m = std::min(m, corridor.b_minus(negative.par[j]) - negative.ortho[j][axis]);
  rep.min_point_value = m;
  double md = std::numeric_limits<double>::infinity();
  for (double xi : linspace(domain.lo, domain.hi, spec.samples)) {
    md = std::min({md, corridor.b_plus(xi), -corridor.b_minus(xi)});
  }
  rep.min_definiteness = md;
  rep.volume = corridor_area_2d(corridor, spec.volume_samples);
  return {std::move(corridor), rep};
}

struct SweepRow {
  int degree = 0;
  std::string formulation;
  double volume = std::numeric_limits<double>::quiet_NaN();
  double objective = std::numeric_limits<double>::quiet_NaN();
  double solve_ms = 0.0;
  double assembly_ms = 0.0;
  std::size_t constraints = 0;
  bool ok = false;
  std::string error;
};

/// Solves the same projected scene for every (degree, formulation) pair.
/// Rows come back ordered by degree, then by the order of `formulations`.
/// In 2D the formulation list is ignored and one planar row per degree is
/// produced. Up to `jobs` rows are solved concurrently.
inline std::vector<SweepRow> degree_sweep(const ProblemSpec& base, const ProjectedCloud& projected,
                                          const std::vector<int>& degrees, const std::vector<Formulation>& formulations,
                                          const ConicBackend& backend, std::shared_ptr<const ParametricPath> path,
                                          const Domain& domain, int jobs = 1) {
  if (!std::is_sorted(degrees.begin(), degrees.end())) throw InputError("sweep degrees must be ascending");
  if (base.dimension == 3 && formulations.empty()) throw InputError("sweep needs at least one formulation");
  struct Task {
    int degree;
    Formulation formulation;
  };
  std::vector<Task> tasks;
  for (int d : degrees) {
    if (base.dimension == 2) {
      tasks.push_back({d, Formulation::DdLp});
    } else {
      for (Formulation f : formulations) tasks.push_back({d, f});
    }
  }
  std::pair<ProjectedCloud, ProjectedCloud> sides;
  if (base.dimension == 2) sides = split_planar(projected);

  std::vector<SweepRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      ProblemSpec spec = base;
      spec.degree = tasks[i].degree;
      spec.formulation = tasks[i].formulation;
      SweepRow& row = rows[i];
      row.degree = spec.degree;
      row.formulation = base.dimension == 2 ? "planar-lp" : to_string(spec.formulation);
      try {
        const SolveReport rep = base.dimension == 2
                                    ? solve_2d(spec, sides.first, sides.second, backend, path, domain).report
                                    : solve_3d(spec, projected, backend, path, domain).report;
        row.volume = rep.volume;
        row.objective = rep.objective;
        row.solve_ms = rep.solve_ms;
        row.assembly_ms = rep.assembly_ms;
        row.constraints = rep.constraints;
        row.ok = true;
      } catch (const SolveFailure& e) {
        row.solve_ms = e.report().solve_ms;
        row.assembly_ms = e.report().assembly_ms;
        row.constraints = e.report().constraints;
        row.error = e.what();
      } catch (const Error& e) {
        row.error = e.what();
      }
    }
  };
  const int n_threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, tasks.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

/// Sweep table as CSV. Failed rows carry nan in the volume column.
inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "degree,formulation,volume,solve_ms,assembly_ms,constraints\n";
  const auto old_prec = os.precision(12);
  for (const auto& r : rows) {
    os << r.degree << ',' << r.formulation << ',';
    if (r.ok) {
      os << r.volume;
    } else {
      os << "nan";
    }
    os << ',' << r.solve_ms << ',' << r.assembly_ms << ',' << r.constraints << '\n';
  }
  os.precision(old_prec);
}

}  // namespace corrgen
