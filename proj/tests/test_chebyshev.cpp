#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "corrgen/chebyshev.hpp"

using namespace corrgen;

TEST(Chebyshev, PureT3AtHalf) {
  const ChebyshevPoly p({0, 0, 0, 1}, {-1, 1});
  EXPECT_NEAR(p(0.5), -1.0, 1e-15);
}

TEST(Chebyshev, ConstantEverywhere) {
  const ChebyshevPoly p({2.0}, {-3, 7});
  for (double xi : {-3.0, 0.0, 1.5, 7.0}) EXPECT_DOUBLE_EQ(p(xi), 2.0);
}

TEST(Chebyshev, AffineMapEndpoint) {
  const ChebyshevPoly p({0, 1}, {0, 10});
  EXPECT_DOUBLE_EQ(p(10.0), 1.0);
  EXPECT_DOUBLE_EQ(p(0.0), -1.0);
}

TEST(Chebyshev, OutsideDomainThrows) {
  const ChebyshevPoly p({1, 2}, {0, 1});
  EXPECT_THROW(p(1.2), DomainError);
  EXPECT_THROW(p(-0.01), DomainError);
  EXPECT_NO_THROW(p(1.0));
}

TEST(Chebyshev, EmptyCoefficientsRejected) { EXPECT_THROW(ChebyshevPoly({}, {0, 1}), InputError); }

TEST(Chebyshev, BasisRowExamples) {
  const Domain d{-1, 1};
  const Eigen::VectorXd r2 = eval_basis_row(2, 0.0, d);
  ASSERT_EQ(r2.size(), 3);
  EXPECT_DOUBLE_EQ(r2[0], 1.0);
  EXPECT_DOUBLE_EQ(r2[1], 0.0);
  EXPECT_DOUBLE_EQ(r2[2], -1.0);

  const Eigen::VectorXd r0 = eval_basis_row(0, 0.3, d);
  ASSERT_EQ(r0.size(), 1);
  EXPECT_DOUBLE_EQ(r0[0], 1.0);

  const Eigen::VectorXd r3 = eval_basis_row(3, 0.5, d);
  EXPECT_NEAR(r3[0], 1.0, 1e-15);
  EXPECT_NEAR(r3[1], 0.5, 1e-15);
  EXPECT_NEAR(r3[2], -0.5, 1e-15);
  EXPECT_NEAR(r3[3], -1.0, 1e-15);
}

TEST(Chebyshev, BasisRowMatchesEvaluation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  const Domain d{2, 5};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> c(8);
    for (auto& v : c) v = u(rng);
    const ChebyshevPoly p(c, d);
    const double xi = 2 + 3 * (u(rng) + 1) / 2;
    const Eigen::VectorXd row = eval_basis_row(7, xi, d);
    EXPECT_NEAR(row.dot(Eigen::Map<const Eigen::VectorXd>(c.data(), 8)), p(xi), 1e-13);
  }
}

TEST(Chebyshev, AgreesWithTrigForm) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 0; n <= 30; ++n) {
    std::vector<double> c(static_cast<std::size_t>(n + 1));
    for (auto& v : c) v = u(rng);
    const ChebyshevPoly p(c, {-1, 1});
    for (int k = 0; k < 20; ++k) {
      const double s = u(rng);
      double direct = 0.0;
      for (int j = 0; j <= n; ++j) direct += c[static_cast<std::size_t>(j)] * std::cos(j * std::acos(s));
      EXPECT_NEAR(p(s), direct, 1e-10) << "n=" << n << " s=" << s;
    }
  }
}

TEST(Chebyshev, BasisNesting) {
  const Domain d{0, 1};
  for (double xi : {0.0, 0.137, 0.5, 0.91, 1.0}) {
    for (int n = 0; n < 25; ++n) {
      const Eigen::VectorXd a = eval_basis_row(n, xi, d);
      const Eigen::VectorXd b = eval_basis_row(n + 1, xi, d);
      EXPECT_EQ(a, b.head(n + 1));
    }
  }
}

TEST(ChebyshevDerivative, Constant) {
  const ChebyshevPoly p({5.0}, {0, 1});
  const ChebyshevPoly dp = p.derivative();
  ASSERT_EQ(dp.coeffs().size(), 1u);
  EXPECT_EQ(dp.coeffs()[0], 0.0);
}

TEST(ChebyshevDerivative, T1) {
  const ChebyshevPoly dp = ChebyshevPoly({0, 1}, {-1, 1}).derivative();
  ASSERT_EQ(dp.coeffs().size(), 1u);
  EXPECT_DOUBLE_EQ(dp.coeffs()[0], 1.0);
}

TEST(ChebyshevDerivative, T2OnShiftedDomainMatchesFiniteDifference) {
  const ChebyshevPoly p({0, 0, 1}, {0, 2});
  const ChebyshevPoly dp = p.derivative();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 1.99);
  for (int k = 0; k < 100; ++k) {
    const double xi = u(rng);
    const double h = 1e-5;
    EXPECT_NEAR(dp(xi), (p(xi + h) - p(xi - h)) / (2 * h), 1e-7);
  }
}

TEST(ChebyshevDerivative, SecondDerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  const Domain d{-0.5, 3.0};
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> c(12);
    for (auto& v : c) v = u(rng);
    const ChebyshevPoly p(c, d);
    const ChebyshevPoly d2 = p.derivative().derivative();
    std::uniform_real_distribution<double> x(-0.4, 2.9);
    for (int k = 0; k < 100; ++k) {
      const double xi = x(rng);
      // Richardson-extrapolated central difference, O(h^4).
      const auto cd = [&](double h) { return (p(xi + h) - 2 * p(xi) + p(xi - h)) / (h * h); };
      const double fd = (4 * cd(5e-4) - cd(1e-3)) / 3;
      EXPECT_NEAR(d2(xi), fd, 1e-5 * std::max(1.0, std::abs(d2(xi))));
    }
  }
}

TEST(Linspace, EndpointsExact) {
  const auto xs = linspace(0.1, 0.7, 7);
  ASSERT_EQ(xs.size(), 7u);
  EXPECT_EQ(xs.front(), 0.1);
  EXPECT_EQ(xs.back(), 0.7);
  EXPECT_THROW(linspace(0, 1, 1), InputError);
}
