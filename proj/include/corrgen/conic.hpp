#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "corrgen/error.hpp"

namespace corrgen {

enum class ConeKind {
  // Every row of the block is >= 0.
  Nonnegative,
  // Rows (a, b, t_1..t_k) with a, b >= 0 and 2ab >= |t|^2.
  RotatedQuadratic,
};

struct ConeBlock {
  ConeKind kind = ConeKind::Nonnegative;
  std::size_t dim = 0;
};

/// Standard-form conic program
///
///   minimize    c^T x
///   subject to  h - G x in K,   A x = b
///
/// K is the product of the cone blocks, which partition the rows of G in
/// order. G and A are given as sparse triplets.
struct ConicProgram {
  int num_vars = 0;
  Eigen::VectorXd objective;
  std::vector<Eigen::Triplet<double>> g;
  std::vector<double> h;
  std::vector<ConeBlock> cones;
  std::vector<Eigen::Triplet<double>> a;
  std::vector<double> b;

  explicit ConicProgram(int vars = 0) : num_vars(vars), objective(Eigen::VectorXd::Zero(vars)) {}

  std::size_t num_rows() const { return h.size(); }
  std::size_t num_equalities() const { return b.size(); }

  /// Appends the row  coeffs . x >= rhs  (a one-dimensional nonnegative cone
  /// slack rhs_row = coeffs . x - rhs). Merges into a trailing nonnegative block.
  void add_greater_equal(const std::vector<std::pair<int, double>>& coeffs, double rhs) {
    const int row = static_cast<int>(h.size());
    for (const auto& [col, v] : coeffs) g.emplace_back(row, col, -v);
    h.push_back(-rhs);
    if (!cones.empty() && cones.back().kind == ConeKind::Nonnegative) {
      ++cones.back().dim;
    } else {
      cones.push_back({ConeKind::Nonnegative, 1});
    }
  }

  /// Appends a rotated quadratic cone whose members are affine in x:
  /// member_j = rows[j] . x + offsets[j].
  void add_rotated_cone(const std::vector<std::vector<std::pair<int, double>>>& rows, const std::vector<double>& offsets) {
    if (rows.size() < 2 || rows.size() != offsets.size()) throw InputError("rotated cone needs matching rows and offsets, dim >= 2");
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const int row = static_cast<int>(h.size());
      for (const auto& [col, v] : rows[j]) g.emplace_back(row, col, -v);
      h.push_back(offsets[j]);
    }
    cones.push_back({ConeKind::RotatedQuadratic, rows.size()});
  }

  void add_equality(const std::vector<std::pair<int, double>>& coeffs, double rhs) {
    const int row = static_cast<int>(b.size());
    for (const auto& [col, v] : coeffs) a.emplace_back(row, col, v);
    b.push_back(rhs);
  }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd x;
  double objective = std::numeric_limits<double>::quiet_NaN();
  // Upper bound on objective - optimum (barrier duality gap nu / t).
  double gap_bound = std::numeric_limits<double>::infinity();
  // Smallest cone margin of h - G x: min over nonnegative rows and
  // over rotated cones of min(a, b, 2ab - |t|^2). Negative means infeasible.
  double min_cone_margin = -std::numeric_limits<double>::infinity();
  double equality_residual = 0.0;
  int newton_steps = 0;
  std::string message;
};

struct SolverSettings {
  double tol_rel = 1e-9;
  double tol_abs = 1e-10;
  double barrier_growth = 20.0;
  int max_newton_steps = 2000;
  int max_centering_steps = 200;
};

/// Backend contract: any solver that takes a ConicProgram and returns
/// primal values, a status and residuals.
class ConicBackend {
 public:
  virtual ~ConicBackend() = default;
  virtual ConicSolution solve(const ConicProgram& program, const Eigen::VectorXd* warm_start = nullptr) const = 0;
  virtual std::string name() const = 0;
};

namespace detail {

// Dense working form of a program after eliminating equalities:
// x = x_part + basis * y, constraints h - G y in K.
struct ReducedProgram {
  Eigen::MatrixXd g_lin;          // nonnegative rows
  Eigen::VectorXd h_lin;
  std::vector<Eigen::MatrixXd> g_cone;  // one block per rotated cone
  std::vector<Eigen::VectorXd> h_cone;
  Eigen::VectorXd c;
  double c_offset = 0.0;
  Eigen::VectorXd x_part;
  Eigen::MatrixXd basis;

  int dim() const { return static_cast<int>(c.size()); }
  double nu() const { return static_cast<double>(h_lin.size()) + 2.0 * static_cast<double>(g_cone.size()); }
};

struct BarrierEval {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

class BarrierCore {
 public:
  explicit BarrierCore(const ReducedProgram& rp) : rp_(rp) {}

  // Smallest interior margin at y. Positive iff strictly interior.
  double margin(const Eigen::VectorXd& y, double shift = 0.0) const {
    double m = std::numeric_limits<double>::infinity();
    if (rp_.h_lin.size() > 0) m = ((rp_.h_lin - rp_.g_lin * y).array() + shift).minCoeff();
    for (std::size_t k = 0; k < rp_.g_cone.size(); ++k) {
      const Eigen::VectorXd s = rp_.h_cone[k] - rp_.g_cone[k] * y;
      const double a = s[0] + shift;
      const double b = s[1] + shift;
      const double f = 2.0 * a * b - s.tail(s.size() - 2).squaredNorm();
      m = std::min({m, a, b, f});
    }
    return m;
  }

  // Barrier value, gradient and Hessian in y. `shift` adds shift * e to every
  // slack, e being the cone identity (1 on nonnegative rows, (1, 1, 0) on
  // rotated cones); it is the phase-one variable.
  bool eval(const Eigen::VectorXd& y, double shift, BarrierEval& out, bool want_hess, Eigen::VectorXd* shift_grad = nullptr,
            Eigen::VectorXd* shift_cross = nullptr, double* shift_hess = nullptr) const {
    const int n = rp_.dim();
    out.value = 0.0;
    out.grad = Eigen::VectorXd::Zero(n);
    if (want_hess) out.hess = Eigen::MatrixXd::Zero(n, n);
    double sg = 0.0;
    double sh = 0.0;
    Eigen::VectorXd cross = Eigen::VectorXd::Zero(n);

    if (rp_.h_lin.size() > 0) {
      const Eigen::ArrayXd s = (rp_.h_lin - rp_.g_lin * y).array() + shift;
      if ((s <= 0.0).any()) return false;
      out.value -= s.log().sum();
      const Eigen::VectorXd inv = s.inverse().matrix();
      // d/dy of -log(h - G y) = G^T / s
      out.grad.noalias() += rp_.g_lin.transpose() * inv;
      sg -= inv.sum();
      if (want_hess) {
        const Eigen::MatrixXd scaled = inv.asDiagonal() * rp_.g_lin;
        out.hess.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
        const Eigen::VectorXd inv2 = inv.array().square().matrix();
        cross.noalias() -= rp_.g_lin.transpose() * inv2;
        sh += inv2.sum();
      }
    }
    for (std::size_t k = 0; k < rp_.g_cone.size(); ++k) {
      Eigen::VectorXd s = rp_.h_cone[k] - rp_.g_cone[k] * y;
      s[0] += shift;
      s[1] += shift;
      const double a = s[0];
      const double b = s[1];
      const double f = 2.0 * a * b - s.tail(s.size() - 2).squaredNorm();
      if (a <= 0.0 || b <= 0.0 || f <= 0.0) return false;
      out.value -= std::log(f);
      // f' with respect to the slack vector.
      Eigen::VectorXd df(s.size());
      df[0] = 2.0 * b;
      df[1] = 2.0 * a;
      df.tail(s.size() - 2) = -2.0 * s.tail(s.size() - 2);
      const Eigen::VectorXd gs = -df / f;  // gradient of -log f in s
      out.grad.noalias() -= rp_.g_cone[k].transpose() * gs;
      sg += gs[0] + gs[1];
      if (want_hess) {
        Eigen::MatrixXd hs = df * df.transpose() / (f * f);
        hs(0, 1) -= 2.0 / f;
        hs(1, 0) -= 2.0 / f;
        for (Eigen::Index j = 2; j < s.size(); ++j) hs(j, j) += 2.0 / f;
        const Eigen::MatrixXd gh = rp_.g_cone[k].transpose() * hs;
        out.hess.noalias() += gh * rp_.g_cone[k];
        Eigen::VectorXd e = Eigen::VectorXd::Zero(s.size());
        e[0] = 1.0;
        e[1] = 1.0;
        cross.noalias() -= gh * e;
        sh += e.dot(hs * e);
      }
    }
    if (want_hess) {
      Eigen::MatrixXd full = out.hess.selfadjointView<Eigen::Lower>();
      out.hess = std::move(full);
    }
    if (shift_grad) *shift_grad = Eigen::VectorXd::Constant(1, sg);
    if (shift_cross) *shift_cross = cross;
    if (shift_hess) *shift_hess = sh;
    return true;
  }

 private:
  const ReducedProgram& rp_;
};

inline Eigen::VectorXd solve_spd(Eigen::MatrixXd hess, const Eigen::VectorXd& rhs) {
  const double diag = std::max(hess.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  double reg = 1e-14 * diag;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::MatrixXd h = hess;
    h.diagonal().array() += reg;
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd sol = llt.solve(rhs);
      if (sol.allFinite()) return sol;
    }
    reg *= 100.0;
  }
  return Eigen::VectorXd::Constant(rhs.size(), std::numeric_limits<double>::quiet_NaN());
}

}  // namespace detail

/// Primal log-barrier path-following interior-point method with a phase-one
/// feasibility search. Iterates stay strictly inside the cones, so the
/// returned point satisfies every conic constraint with a positive margin.
class BarrierSolver : public ConicBackend {
 public:
  explicit BarrierSolver(SolverSettings settings = {}) : settings_(settings) {}

  std::string name() const override { return "barrier"; }
  const SolverSettings& settings() const { return settings_; }

  ConicSolution solve(const ConicProgram& program, const Eigen::VectorXd* warm_start = nullptr) const override {
    ConicSolution sol;
    validate(program);

    detail::ReducedProgram rp;
    if (!reduce(program, rp, sol)) return sol;
    const detail::BarrierCore core(rp);

    Eigen::VectorXd y = Eigen::VectorXd::Zero(rp.dim());
    if (warm_start && warm_start->size() == program.num_vars) {
      y = rp.basis.transpose() * (*warm_start - rp.x_part);
    }
    if (!(core.margin(y) > 0.0)) {
      if (!phase_one(rp, core, y, sol)) return sol;
    }
    phase_two(program, rp, core, y, sol);
    return sol;
  }

  static void validate(const ConicProgram& program) {
    std::size_t rows = 0;
    for (const auto& c : program.cones) {
      if (c.kind == ConeKind::RotatedQuadratic && c.dim < 2) throw InputError("rotated cone dimension must be >= 2");
      rows += c.dim;
    }
    if (rows != program.h.size()) throw InputError("cone blocks do not partition the constraint rows");
    if (program.objective.size() != program.num_vars) throw InputError("objective size mismatch");
  }

 // Building blocks shared with other backends.
  bool reduce(const ConicProgram& p, detail::ReducedProgram& rp, ConicSolution& sol) const {
    const int n = p.num_vars;
    const Eigen::Index m_eq = static_cast<Eigen::Index>(p.b.size());
    if (m_eq > 0) {
      Eigen::SparseMatrix<double> a_sp(m_eq, n);
      a_sp.setFromTriplets(p.a.begin(), p.a.end());
      const Eigen::MatrixXd a = Eigen::MatrixXd(a_sp);
      const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(p.b.data(), m_eq);
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
      rp.x_part = cod.solve(b);
      sol.equality_residual = (a * rp.x_part - b).cwiseAbs().maxCoeff();
      if (sol.equality_residual > 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff())) {
        sol.status = SolveStatus::Infeasible;
        sol.message = "equality constraints are inconsistent";
        return false;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      rp.basis = lu.kernel();
      if (lu.rank() == n) rp.basis = Eigen::MatrixXd::Zero(n, 0);
    } else {
      rp.x_part = Eigen::VectorXd::Zero(n);
      rp.basis = Eigen::MatrixXd::Identity(n, n);
    }

    Eigen::SparseMatrix<double, Eigen::RowMajor> g_sp(static_cast<Eigen::Index>(p.h.size()), n);
    g_sp.setFromTriplets(p.g.begin(), p.g.end());
    const Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(p.h.data(), static_cast<Eigen::Index>(p.h.size()));
    const Eigen::VectorXd h_red = h - g_sp * rp.x_part;

    std::size_t lin_rows = 0;
    for (const auto& c : p.cones)
      if (c.kind == ConeKind::Nonnegative) lin_rows += c.dim;
    rp.g_lin.resize(static_cast<Eigen::Index>(lin_rows), rp.basis.cols());
    rp.h_lin.resize(static_cast<Eigen::Index>(lin_rows));

    std::size_t row = 0;
    Eigen::Index lin = 0;
    for (const auto& c : p.cones) {
      const Eigen::MatrixXd block = Eigen::MatrixXd(g_sp.middleRows(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c.dim))) * rp.basis;
      const Eigen::VectorXd hb = h_red.segment(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c.dim));
      if (c.kind == ConeKind::Nonnegative) {
        rp.g_lin.middleRows(lin, block.rows()) = block;
        rp.h_lin.segment(lin, hb.size()) = hb;
        lin += block.rows();
      } else {
        rp.g_cone.push_back(block);
        rp.h_cone.push_back(hb);
      }
      row += c.dim;
    }
    rp.c = rp.basis.transpose() * p.objective;
    rp.c_offset = p.objective.dot(rp.x_part);
    return true;
  }

  // Minimizes the shift s subject to slacks + s e in K and s >= -1, stopping
  // as soon as s < 0 (strictly feasible y found).
  bool phase_one(const detail::ReducedProgram& rp, const detail::BarrierCore& core, Eigen::VectorXd& y,
                 ConicSolution& sol) const {
    const int n = rp.dim();
    double shift = 0.0;
    {
      // Smallest shift that makes y interior, plus one.
      double need = 0.0;
      if (rp.h_lin.size() > 0) need = std::max(need, -(rp.h_lin - rp.g_lin * y).minCoeff());
      for (std::size_t k = 0; k < rp.g_cone.size(); ++k) {
        const Eigen::VectorXd s = rp.h_cone[k] - rp.g_cone[k] * y;
        need = std::max(need, -std::min(s[0], s[1]) + s.tail(s.size() - 2).norm() / std::sqrt(2.0));
      }
      shift = need + 1.0;
    }
    const double nu = rp.nu() + 1.0;
    double t = 1.0;
    detail::BarrierEval be;
    Eigen::VectorXd sg;
    Eigen::VectorXd cross;
    double sh = 0.0;
    for (int outer = 0; outer < 60; ++outer) {
      for (int it = 0; it < settings_.max_centering_steps; ++it) {
        if (!core.eval(y, shift, be, true, &sg, &cross, &sh)) break;
        // Variables z = (y, shift); objective t*shift + barrier + -log(shift + 1).
        Eigen::MatrixXd hz(n + 1, n + 1);
        hz.topLeftCorner(n, n) = be.hess;
        hz.topRightCorner(n, 1) = cross;
        hz.bottomLeftCorner(1, n) = cross.transpose();
        hz(n, n) = sh + 1.0 / ((shift + 1.0) * (shift + 1.0));
        Eigen::VectorXd gz(n + 1);
        gz.head(n) = be.grad;
        gz[n] = t + sg[0] - 1.0 / (shift + 1.0);
        const Eigen::VectorXd dz = detail::solve_spd(hz, -gz);
        ++sol.newton_steps;
        if (!dz.allFinite()) break;
        const double dec = -gz.dot(dz);
        if (dec < 1e-10) break;
        const double f0 = t * shift + be.value - std::log(shift + 1.0);
        double alpha = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
          const Eigen::VectorXd y_new = y + alpha * dz.head(n);
          const double s_new = shift + alpha * dz[n];
          if (s_new > -1.0 && core.margin(y_new, s_new) > 0.0) {
            detail::BarrierEval bn;
            core.eval(y_new, s_new, bn, false);
            const double f1 = t * s_new + bn.value - std::log(s_new + 1.0);
            if (f1 <= f0 - 0.25 * alpha * dec || dec < 1e-6) {
              y = y_new;
              shift = s_new;
              moved = true;
              break;
            }
          }
          alpha *= 0.5;
        }
        if (!moved) break;
        if (shift < 0.0) return true;
        if (sol.newton_steps > settings_.max_newton_steps) break;
      }
      if (shift < 0.0) return true;
      if (nu / t < 1e-10) break;
      t *= settings_.barrier_growth;
    }
    if (shift < 0.0 && core.margin(y) > 0.0) return true;
    sol.status = SolveStatus::Infeasible;
    sol.message = "no strictly feasible point (phase-one shift " + std::to_string(shift) + ")";
    sol.x = rp.x_part + rp.basis * y;
    sol.min_cone_margin = core.margin(y);
    return false;
  }

  void phase_two(const ConicProgram& program, const detail::ReducedProgram& rp, const detail::BarrierCore& core,
                 Eigen::VectorXd& y, ConicSolution& sol) const {
    const double nu = rp.nu();
    detail::BarrierEval be;
    auto finish = [&](SolveStatus st, double t, std::string msg) {
      sol.status = st;
      sol.x = rp.x_part + rp.basis * y;
      sol.objective = program.objective.dot(sol.x);
      sol.gap_bound = t > 0.0 ? nu / t : std::numeric_limits<double>::infinity();
      sol.min_cone_margin = core.margin(y);
      sol.message = std::move(msg);
    };

    if (nu == 0.0 || rp.dim() == 0) {
      if (rp.c.size() > 0 && rp.c.norm() > 0.0) {
        finish(SolveStatus::Unbounded, 0.0, "objective unbounded: no constraints");
      } else {
        finish(SolveStatus::Optimal, std::numeric_limits<double>::infinity(), "trivial program");
      }
      return;
    }

    // Initial t from the least-squares fit of t c + grad barrier = 0.
    double t = 1.0;
    if (core.eval(y, 0.0, be, true)) {
      const Eigen::VectorXd hc = detail::solve_spd(be.hess, rp.c);
      const Eigen::VectorXd hg = detail::solve_spd(be.hess, be.grad);
      const double denom = rp.c.dot(hc);
      if (denom > 0.0 && std::isfinite(denom)) {
        const double cand = -rp.c.dot(hg) / denom;
        if (cand > 0.0 && std::isfinite(cand)) t = cand;
      }
      t = std::clamp(t, 1e-6, 1e6);
    }

    for (int outer = 0; outer < 200; ++outer) {
      for (int it = 0; it < settings_.max_centering_steps; ++it) {
        if (!core.eval(y, 0.0, be, true)) {
          finish(SolveStatus::NumericalFailure, t, "iterate left the cone interior");
          return;
        }
        const Eigen::VectorXd grad = t * rp.c + be.grad;
        const Eigen::VectorXd dy = detail::solve_spd(be.hess, -grad);
        ++sol.newton_steps;
        if (!dy.allFinite()) {
          finish(SolveStatus::NumericalFailure, t, "Newton system could not be solved");
          return;
        }
        const double dec = -grad.dot(dy);
        if (dec <= 1e-10) break;
        const double f0 = t * rp.c.dot(y) + be.value;
        double alpha = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 80; ++ls) {
          const Eigen::VectorXd y_new = y + alpha * dy;
          if (core.margin(y_new) > 0.0) {
            // Inside the quadratic convergence region the full step is
            // taken once it stays interior; the Armijo test is unreliable
            // there because f is dominated by large t * c^T y terms.
            if (dec < 1e-2) {
              y = y_new;
              moved = true;
              break;
            }
            detail::BarrierEval bn;
            core.eval(y_new, 0.0, bn, false);
            const double f1 = t * rp.c.dot(y_new) + bn.value;
            if (f1 <= f0 - 0.25 * alpha * dec) {
              y = y_new;
              moved = true;
              break;
            }
          }
          alpha *= 0.5;
        }
        if (!moved) break;
        if (!y.allFinite() || y.cwiseAbs().maxCoeff() > 1e15) {
          finish(SolveStatus::Unbounded, t, "iterates diverge; problem appears unbounded");
          return;
        }
        if (sol.newton_steps > settings_.max_newton_steps) {
          finish(SolveStatus::NumericalFailure, t, "Newton step limit reached");
          return;
        }
      }
      const double obj = rp.c.dot(y) + rp.c_offset;
      if (nu / t <= settings_.tol_abs + settings_.tol_rel * std::abs(obj)) {
        finish(SolveStatus::Optimal, t, "converged");
        return;
      }
      if (t > 1e15) break;
      t *= settings_.barrier_growth;
    }
    const double obj = rp.c.dot(y) + rp.c_offset;
    if (nu / t <= 1e-6 * std::max(1.0, std::abs(obj))) {
      finish(SolveStatus::Optimal, t, "converged to reduced accuracy");
    } else {
      finish(SolveStatus::NumericalFailure, t, "barrier parameter limit reached");
    }
  }

 private:
  SolverSettings settings_;
};

namespace detail {

// Second-order cone helpers on u = (u0, u1) with u0 >= |u1|.
inline double soc_det(const Eigen::Ref<const Eigen::VectorXd>& u) { return u[0] * u[0] - u.tail(u.size() - 1).squaredNorm(); }

// Largest alpha >= 0 with u + alpha d in the cone (u interior).
inline double soc_max_step(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& d) {
  const double inf = std::numeric_limits<double>::infinity();
  const double a = soc_det(d);
  const double b = 2.0 * (u[0] * d[0] - u.tail(u.size() - 1).dot(d.tail(d.size() - 1)));
  const double c = soc_det(u);
  double best = d[0] < 0.0 ? -u[0] / d[0] : inf;
  if (std::abs(a) < 1e-300) {
    if (b < 0.0) best = std::min(best, -c / b);
    return best;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return best;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  for (double r : {q / a, q != 0.0 ? c / q : inf}) {
    if (r > 0.0) best = std::min(best, r);
  }
  return best;
}

// Jordan product and its inverse for one cone block.
inline Eigen::VectorXd soc_prod(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  Eigen::VectorXd w(u.size());
  w[0] = u.dot(v);
  w.tail(u.size() - 1) = u[0] * v.tail(v.size() - 1) + v[0] * u.tail(u.size() - 1);
  return w;
}

inline Eigen::VectorXd soc_div(const Eigen::VectorXd& l, const Eigen::VectorXd& v) {
  Eigen::VectorXd x(l.size());
  const auto l1 = l.tail(l.size() - 1);
  x[0] = (l[0] * v[0] - l1.dot(v.tail(v.size() - 1))) / soc_det(l);
  x.tail(l.size() - 1) = (v.tail(v.size() - 1) - x[0] * l1) / l[0];
  return x;
}

}  // namespace detail

/// Primal-dual interior-point method (Mehrotra predictor-corrector with
/// Nesterov-Todd scaling). Rotated cones are mapped onto standard second
/// order cones. It starts from a strictly feasible primal point found by the
/// barrier phase one, so the primal residual stays at rounding level. Falls
/// back to the barrier method when it does not converge.
class PrimalDualSolver : public ConicBackend {
 public:
  explicit PrimalDualSolver(SolverSettings settings = {}) : settings_(settings), barrier_(settings) {}

  std::string name() const override { return "primal-dual"; }
  const SolverSettings& settings() const { return settings_; }

  ConicSolution solve(const ConicProgram& program, const Eigen::VectorXd* warm_start = nullptr) const override {
    BarrierSolver::validate(program);
    ConicSolution sol;
    detail::ReducedProgram rp;
    if (!barrier_.reduce(program, rp, sol)) return sol;
    const detail::BarrierCore core(rp);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(rp.dim());
    if (warm_start && warm_start->size() == program.num_vars) y = rp.basis.transpose() * (*warm_start - rp.x_part);
    if (!(core.margin(y) > 0.0)) {
      if (!barrier_.phase_one(rp, core, y, sol)) return sol;
    }
    if (rp.nu() > 0.0 && rp.dim() > 0) {
      const Eigen::VectorXd y0 = y;
      if (iterate(program, rp, core, y, sol)) return sol;
      y = y0;
      if (sol.status == SolveStatus::Unbounded) return sol;
    }
    barrier_.phase_two(program, rp, core, y, sol);
    return sol;
  }

 private:
  bool iterate(const ConicProgram& program, const detail::ReducedProgram& rp, const detail::BarrierCore& core,
               Eigen::VectorXd& y, ConicSolution& sol) const {
    using Eigen::Index;
    using Eigen::MatrixXd;
    using Eigen::VectorXd;
    const Index n = rp.dim();
    const Index ml = rp.h_lin.size();
    std::vector<Index> off;
    Index mc = 0;
    for (const auto& g : rp.g_cone) {
      off.push_back(ml + mc);
      mc += g.rows();
    }
    const Index m = ml + mc;
    const auto ncones = static_cast<Index>(rp.g_cone.size());
    const auto dim_of = [&](Index k) { return rp.g_cone[static_cast<std::size_t>(k)].rows(); };

    // Stacked constraints; rotated (a, b, t) becomes ((a+b)/r2, (a-b)/r2, t).
    MatrixXd g(m, n);
    VectorXd h(m);
    g.topRows(ml) = rp.g_lin;
    h.head(ml) = rp.h_lin;
    const double r2 = std::sqrt(0.5);
    for (Index k = 0; k < ncones; ++k) {
      const auto& gk = rp.g_cone[static_cast<std::size_t>(k)];
      const auto& hk = rp.h_cone[static_cast<std::size_t>(k)];
      auto gb = g.middleRows(off[k], gk.rows());
      auto hb = h.segment(off[k], gk.rows());
      gb = gk;
      hb = hk;
      gb.row(0) = r2 * (gk.row(0) + gk.row(1));
      gb.row(1) = r2 * (gk.row(0) - gk.row(1));
      hb[0] = r2 * (hk[0] + hk[1]);
      hb[1] = r2 * (hk[0] - hk[1]);
    }
    const VectorXd& c = rp.c;
    const double nu = static_cast<double>(ml + ncones);

    VectorXd x = y;
    VectorXd s = h - g * x;
    VectorXd z(m);
    z.head(ml) = s.head(ml).cwiseInverse();
    for (Index k = 0; k < ncones; ++k) {
      auto sk = s.segment(off[k], dim_of(k));
      auto zk = z.segment(off[k], dim_of(k));
      if (!(sk[0] > 0.0 && detail::soc_det(sk) > 0.0)) return false;
      zk = -sk / detail::soc_det(sk);
      zk[0] = -zk[0];
    }

    std::vector<MatrixXd> winv(static_cast<std::size_t>(ncones));
    VectorXd wl;
    VectorXd lam(m);
    MatrixXd gs(m, n);
    MatrixXd hess(n, n);
    const double c_scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    const double h_scale = std::max(1.0, h.cwiseAbs().maxCoeff());

    // W^{-1} v.
    const auto apply_winv = [&](const VectorXd& v) {
      VectorXd out(m);
      out.head(ml) = v.head(ml).cwiseQuotient(wl);
      for (Index k = 0; k < ncones; ++k) out.segment(off[k], dim_of(k)) = winv[static_cast<std::size_t>(k)] * v.segment(off[k], dim_of(k));
      return out;
    };
    const auto prod = [&](const VectorXd& u, const VectorXd& v) {
      VectorXd out(m);
      out.head(ml) = u.head(ml).cwiseProduct(v.head(ml));
      for (Index k = 0; k < ncones; ++k) out.segment(off[k], dim_of(k)) = detail::soc_prod(u.segment(off[k], dim_of(k)), v.segment(off[k], dim_of(k)));
      return out;
    };
    const auto div = [&](const VectorXd& l, const VectorXd& v) {
      VectorXd out(m);
      out.head(ml) = v.head(ml).cwiseQuotient(l.head(ml));
      for (Index k = 0; k < ncones; ++k) out.segment(off[k], dim_of(k)) = detail::soc_div(l.segment(off[k], dim_of(k)), v.segment(off[k], dim_of(k)));
      return out;
    };
    const auto max_step = [&](const VectorXd& u, const VectorXd& d) {
      double a = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < ml; ++i)
        if (d[i] < 0.0) a = std::min(a, -u[i] / d[i]);
      for (Index k = 0; k < ncones; ++k) a = std::min(a, detail::soc_max_step(u.segment(off[k], dim_of(k)), d.segment(off[k], dim_of(k))));
      return a;
    };
    VectorXd e = VectorXd::Zero(m);
    e.head(ml).setOnes();
    for (Index k = 0; k < ncones; ++k) e[off[k]] = 1.0;

    for (int iter = 0; iter < 100; ++iter) {
      // Nesterov-Todd scaling.
      wl = (s.head(ml).array() / z.head(ml).array()).sqrt().matrix();
      lam.head(ml) = (s.head(ml).array() * z.head(ml).array()).sqrt().matrix();
      for (Index k = 0; k < ncones; ++k) {
        const Index d = dim_of(k);
        const VectorXd sk = s.segment(off[k], d);
        const VectorXd zk = z.segment(off[k], d);
        const double sd = detail::soc_det(sk);
        const double zd = detail::soc_det(zk);
        if (!(sd > 0.0 && zd > 0.0)) return false;
        const VectorXd sb = sk / std::sqrt(sd);
        VectorXd zb = zk / std::sqrt(zd);
        const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
        zb.tail(d - 1) = -zb.tail(d - 1);
        const VectorXd wb = (sb + zb) / (2.0 * gamma);
        const double eta = std::pow(sd / zd, 0.25);
        const auto w1 = wb.tail(d - 1);
        // W^{-1} = (1/eta) [[w0, -w1^T], [-w1, I + w1 w1^T / (1 + w0)]]
        auto& wik = winv[static_cast<std::size_t>(k)];
        wik.resize(d, d);
        wik(0, 0) = wb[0];
        wik.block(1, 1, d - 1, d - 1) = MatrixXd::Identity(d - 1, d - 1) + w1 * w1.transpose() / (1.0 + wb[0]);
        wik.block(0, 1, 1, d - 1) = -w1.transpose();
        wik.block(1, 0, d - 1, 1) = -w1;
        wik /= eta;
        lam.segment(off[k], d) = wik * sk;
      }

      const VectorXd rp_res = g * x + s - h;
      const VectorXd rd_res = g.transpose() * z + c;
      const double gap = s.dot(z);
      const double pobj = c.dot(x) + rp.c_offset;
      if (rd_res.cwiseAbs().maxCoeff() <= 1e-9 * c_scale && rp_res.cwiseAbs().maxCoeff() <= 1e-9 * h_scale &&
          gap <= settings_.tol_abs + settings_.tol_rel * std::abs(pobj)) {
        y = x;
        if (!(core.margin(y) > 0.0)) return false;
        sol.status = SolveStatus::Optimal;
        sol.x = rp.x_part + rp.basis * y;
        sol.objective = program.objective.dot(sol.x);
        sol.gap_bound = gap;
        sol.min_cone_margin = core.margin(y);
        sol.message = "converged";
        return true;
      }
      if (x.cwiseAbs().maxCoeff() > 1e12) {
        sol.status = SolveStatus::Unbounded;
        sol.x = rp.x_part + rp.basis * x;
        sol.objective = program.objective.dot(sol.x);
        sol.message = "iterates diverge; problem appears unbounded";
        return false;
      }

      // Scaled normal equations  (W^-1 G)^T (W^-1 G) dx = rhs.
      gs.topRows(ml) = wl.cwiseInverse().asDiagonal() * g.topRows(ml);
      for (Index k = 0; k < ncones; ++k)
        gs.middleRows(off[k], dim_of(k)).noalias() = winv[static_cast<std::size_t>(k)] * g.middleRows(off[k], dim_of(k));
      hess.setZero();
      hess.selfadjointView<Eigen::Lower>().rankUpdate(gs.transpose());
      const double reg = 1e-13 * std::max(hess.diagonal().maxCoeff(), 1e-300);
      hess.diagonal().array() += reg;
      Eigen::LLT<MatrixXd, Eigen::Lower> llt(hess);
      if (llt.info() != Eigen::Success) return false;
      const VectorXd winv_rp = apply_winv(rp_res);

      struct Step {
        VectorXd dx, ds, dz, wdz;
      };
      const auto direction = [&](const VectorXd& target) {
        Step st;
        const VectorXd rhat = div(lam, target);
        const VectorXd v = winv_rp + rhat;
        const VectorXd rhs = -rd_res - gs.transpose() * v;
        st.dx = llt.solve(rhs);
        for (int refine = 0; refine < 3; ++refine) {
          const VectorXd r = rhs - gs.transpose() * (gs * st.dx);
          if (r.cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, rhs.cwiseAbs().maxCoeff())) break;
          st.dx += llt.solve(r);
        }
        st.wdz = gs * st.dx + v;
        st.dz = apply_winv(st.wdz);
        st.ds = -rp_res - g * st.dx;
        return st;
      };

      const VectorXd ll = prod(lam, lam);
      const Step aff = direction(-ll);
      const double a_aff = std::min({1.0, max_step(s, aff.ds), max_step(z, aff.dz)});
      const double mu = gap / nu;
      const double rho = (s + a_aff * aff.ds).dot(z + a_aff * aff.dz) / gap;
      const double sigma = std::clamp(rho, 0.0, 1.0);
      const VectorXd corr = prod(apply_winv(aff.ds), aff.wdz);
      const Step st = direction(sigma * sigma * sigma * mu * e - ll - corr);
      if (!st.dx.allFinite()) return false;
      const double a_max = std::min(max_step(s, st.ds), max_step(z, st.dz));
      const double alpha = std::min(1.0, 0.99 * a_max);
      if (!(alpha > 1e-12)) return false;
      x += alpha * st.dx;
      s += alpha * st.ds;
      z += alpha * st.dz;
      ++sol.newton_steps;
    }
    return false;
  }

  SolverSettings settings_;
  BarrierSolver barrier_;
};

}  // namespace corrgen
