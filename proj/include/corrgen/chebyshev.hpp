#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "corrgen/error.hpp"

namespace corrgen {

// Closed parameter interval [lo, hi] with lo < hi.
struct Domain {
  double lo = -1.0;
  double hi = 1.0;

  double width() const { return hi - lo; }

  // Slack used when deciding whether a parameter lies inside the domain.
  // Values within it are clamped; anything further out is a DomainError.
  double slack() const { return 1e-12 * std::max(1.0, std::abs(lo) + std::abs(hi)); }

  bool operator==(const Domain&) const = default;
};

namespace detail {

inline double to_unit_interval(const Domain& dom, double xi) {
  if (!(xi >= dom.lo - dom.slack() && xi <= dom.hi + dom.slack())) {
    std::ostringstream msg;
    msg << "parameter " << xi << " outside domain [" << dom.lo << ", " << dom.hi << "]";
    throw DomainError(msg.str());
  }
  const double s = (2.0 * xi - dom.lo - dom.hi) / dom.width();
  return std::clamp(s, -1.0, 1.0);
}

}  // namespace detail

/// Scalar polynomial in the Chebyshev-T basis over a parameter domain.
///
/// The value at xi is sum_k coeffs[k] * T_k(s) where s is the affine image
/// of xi in [-1, 1]. Coefficients are stored lowest order first.
class ChebyshevPoly {
 public:
  ChebyshevPoly() : coeffs_{0.0} {}

  ChebyshevPoly(std::vector<double> coeffs, Domain domain) : coeffs_(std::move(coeffs)), domain_(domain) {
    if (coeffs_.empty()) throw InputError("Chebyshev polynomial needs at least one coefficient");
    if (!(domain_.lo < domain_.hi)) throw InputError("Chebyshev domain must satisfy lo < hi");
  }

  static ChebyshevPoly constant(double value, Domain domain) { return ChebyshevPoly({value}, domain); }

  const std::vector<double>& coeffs() const { return coeffs_; }
  const Domain& domain() const { return domain_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  /// Clenshaw evaluation.
  double operator()(double xi) const {
    const double s = detail::to_unit_interval(domain_, xi);
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 1;) {
      const double b0 = coeffs_[k] + 2.0 * s * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    return coeffs_[0] + s * b1 - b2;
  }

  /// d/dxi, including the 2 / (hi - lo) factor of the affine map.
  ChebyshevPoly derivative() const {
    const std::size_t n = coeffs_.size() - 1;
    if (n == 0) return ChebyshevPoly({0.0}, domain_);
    std::vector<double> d(n + 1, 0.0);
    // d_{k-1} = d_{k+1} + 2 k c_k, run downwards; d_0 is halved at the end.
    for (std::size_t k = n; k >= 1; --k) {
      d[k - 1] = (k + 1 <= n ? d[k + 1] : 0.0) + 2.0 * static_cast<double>(k) * coeffs_[k];
    }
    d[0] *= 0.5;
    d.pop_back();
    const double scale = 2.0 / domain_.width();
    for (double& v : d) v *= scale;
    return ChebyshevPoly(std::move(d), domain_);
  }

 private:
  std::vector<double> coeffs_;
  Domain domain_{};
};

/// [T_0(s), ..., T_degree(s)] at the affine image s of xi.
inline Eigen::VectorXd eval_basis_row(int degree, double xi, const Domain& domain) {
  if (degree < 0) throw InputError("basis degree must be non-negative");
  const double s = detail::to_unit_interval(domain, xi);
  Eigen::VectorXd row(degree + 1);
  row[0] = 1.0;
  if (degree >= 1) row[1] = s;
  for (int k = 2; k <= degree; ++k) row[k] = 2.0 * s * row[k - 1] - row[k - 2];
  return row;
}

/// n uniformly spaced samples covering [lo, hi], endpoints included.
inline std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw InputError("linspace needs at least two samples");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = hi;
  return out;
}

}  // namespace corrgen
