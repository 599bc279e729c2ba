#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "tvn/quadrature.hpp"
#include "tvn/spherical_harmonics.hpp"

using std::numbers::pi;

namespace {

// Y_lm from the C++17 special functions; std::sph_legendre carries the
// Condon-Shortley phase (-1)^m, which the real basis here omits.
double reference_harmonic(int l, int m, double theta, double phi) {
  const int am = std::abs(m);
  const double p = std::sph_legendre(l, am, theta) * ((am % 2) ? -1.0 : 1.0);
  if (m == 0) return p;
  return std::numbers::sqrt2 * p * (m > 0 ? std::cos(am * phi) : std::sin(am * phi));
}

TEST(SphericalHarmonics, LowDegreeClosedForms) {
  const double t = 0.83, p = 2.1;
  const auto y = tvn::spherical_harmonic_values(3, t, p);
  const double c = std::cos(t), s = std::sin(t);
  EXPECT_NEAR(y[tvn::harmonic_index(0, 0)], 0.5 / std::sqrt(pi), 1e-15);
  EXPECT_NEAR(y[tvn::harmonic_index(1, 0)], std::sqrt(3.0 / (4.0 * pi)) * c, 1e-15);
  EXPECT_NEAR(y[tvn::harmonic_index(1, 1)], std::sqrt(3.0 / (4.0 * pi)) * s * std::cos(p), 1e-15);
  EXPECT_NEAR(y[tvn::harmonic_index(1, -1)], std::sqrt(3.0 / (4.0 * pi)) * s * std::sin(p), 1e-15);
  EXPECT_NEAR(y[tvn::harmonic_index(2, 0)], std::sqrt(5.0 / (16.0 * pi)) * (3.0 * c * c - 1.0), 1e-15);
  EXPECT_NEAR(y[tvn::harmonic_index(3, 2)],
              std::sqrt(105.0 / (16.0 * pi)) * s * s * c * std::cos(2.0 * p), 1e-15);
  EXPECT_NEAR(y[tvn::harmonic_index(3, -3)],
              std::sqrt(35.0 / (32.0 * pi)) * s * s * s * std::sin(3.0 * p), 1e-15);
}

TEST(SphericalHarmonics, MatchStandardLibraryUpToDegree20) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> th(0.01, pi - 0.01), ph(0.0, 2.0 * pi);
  for (int trial = 0; trial < 50; ++trial) {
    const double t = th(rng), p = ph(rng);
    const auto y = tvn::spherical_harmonic_values(20, t, p);
    for (int l = 0; l <= 20; ++l)
      for (int m = -l; m <= l; ++m)
        EXPECT_NEAR(y[tvn::harmonic_index(l, m)], reference_harmonic(l, m, t, p), 1e-12)
            << "l=" << l << " m=" << m;
  }
}

TEST(SphericalHarmonics, JetDerivativesMatchFiniteDifferences) {
  const double t = 1.2, p = 0.4, h = 1e-3;
  const auto jets = tvn::spherical_harmonics<3>(6, t, p);
  for (int l = 0; l <= 6; ++l)
    for (int m = -l; m <= l; ++m) {
      const auto k = tvn::harmonic_index(l, m);
      auto f = [&](double a, double b) { return reference_harmonic(l, m, a, b); };
      // fourth-order central stencils
      const double dt = (-f(t + 2 * h, p) + 8 * f(t + h, p) - 8 * f(t - h, p) + f(t - 2 * h, p)) / (12 * h);
      const double dp = (-f(t, p + 2 * h) + 8 * f(t, p + h) - 8 * f(t, p - h) + f(t, p - 2 * h)) / (12 * h);
      const double dtt = (-f(t + 2 * h, p) + 16 * f(t + h, p) - 30 * f(t, p) + 16 * f(t - h, p) -
                          f(t - 2 * h, p)) / (12 * h * h);
      auto dt_at = [&](double b) {
        return (-f(t + 2 * h, b) + 8 * f(t + h, b) - 8 * f(t - h, b) + f(t - 2 * h, b)) / (12 * h);
      };
      const double dtp = (-dt_at(p + 2 * h) + 8 * dt_at(p + h) - 8 * dt_at(p - h) + dt_at(p - 2 * h)) / (12 * h);
      EXPECT_NEAR(jets[k].derivative(1, 0), dt, 1e-8);
      EXPECT_NEAR(jets[k].derivative(0, 1), dp, 1e-8);
      EXPECT_NEAR(jets[k].derivative(2, 0), dtt, 1e-6);
      EXPECT_NEAR(jets[k].derivative(1, 1), dtp, 1e-6);
    }
}

TEST(SphericalHarmonics, OrthonormalUnderExactQuadrature) {
  const int degree = 8;
  const tvn::QuadratureGrid grid(2 * degree + 2, 4 * degree + 4);
  const std::size_t n = tvn::harmonic_count(degree);
  std::vector<double> gram(n * n, 0.0);
  for (const auto& node : grid.nodes()) {
    const auto y = tvn::spherical_harmonic_values(degree, node.theta, node.phi);
    const double w = node.weight * std::sin(node.theta);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) gram[a * n + b] += w * y[a] * y[b];
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      EXPECT_NEAR(gram[a * n + b], a == b ? 1.0 : 0.0, 1e-12) << a << "," << b;
}

TEST(SphericalHarmonics, IndexRoundTrip) {
  for (int l = 0; l <= 30; ++l)
    for (int m = -l; m <= l; ++m) {
      const auto lm = tvn::harmonic_lm(tvn::harmonic_index(l, m));
      EXPECT_EQ(lm.l, l);
      EXPECT_EQ(lm.m, m);
    }
}

TEST(HarmonicExpansion, ConstantAndResize) {
  const auto c = tvn::HarmonicExpansion::constant(2.5);
  EXPECT_NEAR(c.value(0.3, 1.0), 2.5, 1e-14);
  const auto r = c.resized(3);
  EXPECT_EQ(r.degree(), 3);
  EXPECT_EQ(r.coefficients().size(), 16u);
  EXPECT_NEAR(r.value(2.0, 4.0), 2.5, 1e-14);
  EXPECT_THROW(tvn::HarmonicExpansion(std::vector<double>(5, 0.0)), std::invalid_argument);
}

TEST(GaussLegendre, ThreePointRule) {
  const auto r = tvn::gauss_legendre(3);
  EXPECT_NEAR(r.nodes[0], std::sqrt(0.6), 1e-15);
  EXPECT_EQ(r.nodes[1], 0.0);
  EXPECT_NEAR(r.nodes[2], -std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(r.weights[0], 5.0 / 9.0, 1e-15);
  EXPECT_NEAR(r.weights[1], 8.0 / 9.0, 1e-15);
}

TEST(GaussLegendre, ExactForPolynomialsOfDegree2nMinus1) {
  for (int n : {1, 2, 5, 16, 33, 64}) {
    const auto r = tvn::gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      const double exact = (k % 2) ? 0.0 : 2.0 / (k + 1);
      EXPECT_NEAR(s, exact, 1e-14) << "n=" << n << " k=" << k;
    }
  }
}

TEST(QuadratureGrid, IntegratesTheUnitSphereArea) {
  const tvn::QuadratureGrid grid(16, 32);
  double s = 0.0;
  for (const auto& node : grid.nodes()) s += node.weight * std::sin(node.theta);
  EXPECT_NEAR(s, 4.0 * pi, 1e-13);
  EXPECT_EQ(grid.size(), 512u);
  EXPECT_EQ(grid.node(3, 5).phi, grid.node(3 * 32 + 5).phi);
  EXPECT_EQ(grid.max_exact_degree(), 7);
  EXPECT_THROW(tvn::QuadratureGrid(0, 4), std::invalid_argument);
}

}  // namespace
