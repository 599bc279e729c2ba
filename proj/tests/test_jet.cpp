#include <cmath>

#include <gtest/gtest.h>

#include "tvn/jet.hpp"

using tvn::Jet;

namespace {

// f = sin(theta * phi): closed-form partials.
TEST(Jet, ProductInsideSine) {
  const double t = 0.7, p = -1.3;
  const Jet<3> f = sin(Jet<3>::theta(t) * Jet<3>::phi(p));
  const double a = t * p;
  EXPECT_NEAR(f.value(), std::sin(a), 1e-15);
  EXPECT_NEAR(f.derivative(1, 0), p * std::cos(a), 1e-14);
  EXPECT_NEAR(f.derivative(0, 1), t * std::cos(a), 1e-14);
  EXPECT_NEAR(f.derivative(2, 0), -p * p * std::sin(a), 1e-14);
  EXPECT_NEAR(f.derivative(1, 1), std::cos(a) - a * std::sin(a), 1e-14);
  EXPECT_NEAR(f.derivative(3, 0), -p * p * p * std::cos(a), 1e-13);
  EXPECT_NEAR(f.derivative(2, 1), -2.0 * p * std::sin(a) - p * a * std::cos(a), 1e-13);
}

// g = 1 / sqrt(1 + theta^2 + phi): closed-form partials.
TEST(Jet, SqrtAndInverse) {
  const double t = 0.4, p = 0.9;
  const Jet<3> th = Jet<3>::theta(t);
  const Jet<3> ph = Jet<3>::phi(p);
  const Jet<3> g = inverse(sqrt(1.0 + th * th + ph));
  const double u = 1.0 + t * t + p;
  EXPECT_NEAR(g.value(), std::pow(u, -0.5), 1e-15);
  EXPECT_NEAR(g.derivative(1, 0), -t * std::pow(u, -1.5), 1e-14);
  EXPECT_NEAR(g.derivative(0, 1), -0.5 * std::pow(u, -1.5), 1e-14);
  EXPECT_NEAR(g.derivative(0, 2), 0.75 * std::pow(u, -2.5), 1e-14);
  EXPECT_NEAR(g.derivative(1, 1), 1.5 * t * std::pow(u, -2.5), 1e-14);
  EXPECT_NEAR(g.derivative(2, 0), -std::pow(u, -1.5) + 3.0 * t * t * std::pow(u, -2.5), 1e-14);
  EXPECT_NEAR(g.derivative(0, 3), -1.875 * std::pow(u, -3.5), 1e-13);
}

TEST(Jet, DivisionMatchesQuotientRule) {
  const double t = 1.1, p = 0.3;
  const Jet<2> th = Jet<2>::theta(t);
  const Jet<2> ph = Jet<2>::phi(p);
  const Jet<2> q = cos(th) / (2.0 + sin(ph));
  const double den = 2.0 + std::sin(p);
  EXPECT_NEAR(q.derivative(1, 0), -std::sin(t) / den, 1e-15);
  EXPECT_NEAR(q.derivative(0, 1), -std::cos(t) * std::cos(p) / (den * den), 1e-15);
  EXPECT_NEAR(q.derivative(1, 1), std::sin(t) * std::cos(p) / (den * den), 1e-15);
}

TEST(Jet, DifferentiationShiftsCoefficients) {
  const Jet<3> f = sin(Jet<3>::theta(0.2)) * cos(Jet<3>::phi(0.5) * 2.0);
  const Jet<2> ft = f.d_theta();
  const Jet<2> fp = f.d_phi();
  for (int i = 0; i <= 2; ++i)
    for (int j = 0; i + j <= 2; ++j) {
      EXPECT_NEAR(ft.derivative(i, j), f.derivative(i + 1, j), 1e-14);
      EXPECT_NEAR(fp.derivative(i, j), f.derivative(i, j + 1), 1e-14);
    }
}

TEST(Jet, VectorHelpers) {
  const tvn::JetVec3<2> a{Jet<2>::theta(1.0), Jet<2>(2.0), Jet<2>::phi(3.0)};
  const tvn::JetVec3<2> b{Jet<2>(0.5), Jet<2>::phi(-1.0), Jet<2>::theta(0.25)};
  const Eigen::Vector3d c = tvn::value_of(tvn::cross(a, b));
  const Eigen::Vector3d expect = tvn::value_of(a).cross(tvn::value_of(b));
  EXPECT_NEAR((c - expect).norm(), 0.0, 1e-15);
  const auto n = tvn::normalized(a);
  EXPECT_NEAR(tvn::dot(n, n).value(), 1.0, 1e-15);
  EXPECT_NEAR(tvn::dot(n, n).derivative(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(tvn::dot(n, n).derivative(1, 1), 0.0, 1e-14);
}

}  // namespace
