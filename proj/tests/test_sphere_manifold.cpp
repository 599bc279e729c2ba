#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "tvn/errors.hpp"
#include "tvn/sphere_manifold.hpp"

namespace sphere = tvn::sphere;
using tvn::TangentVector;
using tvn::UnitNormal;
using tvn::Vec3;

namespace {

constexpr int kSamples = 10000;

class SphereProperties : public ::testing::Test {
 protected:
  std::mt19937_64 rng{20261016};
  std::normal_distribution<double> gauss{0.0, 1.0};

  Vec3 gaussian() { return {gauss(rng), gauss(rng), gauss(rng)}; }
  UnitNormal point() { return UnitNormal(gaussian()); }
  // Pairs that stay away from the antipodal set.
  std::pair<UnitNormal, UnitNormal> pair() {
    for (;;) {
      UnitNormal a = point();
      UnitNormal b = point();
      if (a.vec().dot(b.vec()) > -0.999) return {a, b};
    }
  }
};

TEST_F(SphereProperties, LogInvertsExp) {
  for (int s = 0; s < kSamples; ++s) {
    const auto [n, m] = pair();
    const TangentVector v = sphere::log_map(n, m);
    EXPECT_NEAR(std::abs(v.vec().dot(n.vec())), 0.0, 1e-12);
    EXPECT_NEAR((sphere::exp_map(n, v).vec() - m.vec()).norm(), 0.0, 1e-12);
    EXPECT_NEAR(v.norm(), sphere::geodesic_distance(n, m), 1e-7);
  }
}

TEST_F(SphereProperties, ExpInvertsLogBelowPi) {
  std::uniform_real_distribution<double> len(0.0, 0.99 * std::numbers::pi);
  for (int s = 0; s < kSamples; ++s) {
    const UnitNormal n = point();
    const Vec3 dir = TangentVector(n, gaussian()).vec().normalized();
    const TangentVector xi(n, len(rng) * dir);
    const TangentVector back = sphere::log_map(n, sphere::exp_map(n, xi));
    EXPECT_NEAR((back.vec() - xi.vec()).norm(), 0.0, 1e-9);
  }
}

TEST_F(SphereProperties, DistanceIsAMetric) {
  for (int s = 0; s < kSamples; ++s) {
    const UnitNormal a = point(), b = point(), c = point();
    const double ab = sphere::geodesic_distance(a, b);
    EXPECT_DOUBLE_EQ(ab, sphere::geodesic_distance(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, std::numbers::pi);
    EXPECT_LE(ab, sphere::geodesic_distance(a, c) + sphere::geodesic_distance(c, b) + 1e-12);
  }
  const UnitNormal a = point();
  EXPECT_NEAR(sphere::geodesic_distance(a, a), 0.0, 1e-7);
}

TEST_F(SphereProperties, GeodesicStaysOnSphereAndHasConstantSpeed) {
  for (int s = 0; s < kSamples / 10; ++s) {
    const UnitNormal n = point();
    const TangentVector xi(n, gaussian());
    const double t = 0.37;
    const UnitNormal g = sphere::geodesic(n, xi, t);
    EXPECT_NEAR(g.vec().norm(), 1.0, 1e-15);
    // distance travelled is t |xi| modulo wrap-around
    const double travelled = std::fmod(t * xi.norm(), 2.0 * std::numbers::pi);
    const double expect = travelled <= std::numbers::pi ? travelled : 2.0 * std::numbers::pi - travelled;
    EXPECT_NEAR(sphere::geodesic_distance(n, g), expect, 1e-7);
  }
}

TEST_F(SphereProperties, TransportIsAnIsometryOntoTheTargetPlane) {
  for (int s = 0; s < kSamples; ++s) {
    const auto [n, m] = pair();
    const TangentVector a(n, gaussian());
    const TangentVector b(n, gaussian());
    const TangentVector ta = sphere::parallel_transport(n, m, a);
    const TangentVector tb = sphere::parallel_transport(n, m, b);
    const double scale = 1.0 + a.norm() * b.norm();
    EXPECT_NEAR(ta.vec().dot(m.vec()), 0.0, 1e-10 * scale);
    EXPECT_NEAR(ta.norm(), a.norm(), 1e-10 * scale);
    EXPECT_NEAR(ta.vec().dot(tb.vec()), a.vec().dot(b.vec()), 1e-10 * scale);
  }
}

TEST_F(SphereProperties, TransportFormulasAgree) {
  for (int s = 0; s < kSamples; ++s) {
    const auto [n, m] = pair();
    const TangentVector a(n, gaussian());
    const Vec3 p = sphere::parallel_transport(n, m, a).vec();
    const Vec3 q = sphere::parallel_transport_rotation(n, m, a).vec();
    EXPECT_NEAR((p - q).norm(), 0.0, 1e-10 * (1.0 + a.norm()));
  }
}

TEST_F(SphereProperties, TransportMovesTheGeodesicVelocity) {
  // The velocity log_n m arrives as -log_m n.
  for (int s = 0; s < kSamples; ++s) {
    const auto [n, m] = pair();
    const TangentVector v = sphere::log_map(n, m);
    const TangentVector w = sphere::log_map(m, n);
    const Vec3 moved = sphere::parallel_transport(n, m, v).vec();
    EXPECT_NEAR((moved + w.vec()).norm(), 0.0, 1e-9);
  }
}

TEST_F(SphereProperties, TransportThereAndBackIsIdentity) {
  for (int s = 0; s < kSamples; ++s) {
    const auto [n, m] = pair();
    const TangentVector a(n, gaussian());
    const TangentVector back =
        sphere::parallel_transport(m, n, sphere::parallel_transport(n, m, a));
    EXPECT_NEAR((back.vec() - a.vec()).norm(), 0.0, 1e-9 * (1.0 + a.norm()));
  }
}

TEST(Sphere, TransportAlongEquatorFixesTheNormalDirection) {
  // Moving from e1 to e2 along the equator keeps e3 and rotates e2 to -e1.
  const UnitNormal a(Vec3::UnitX());
  const UnitNormal b(Vec3::UnitY());
  const Vec3 t3 = sphere::parallel_transport(a, b, TangentVector(a, Vec3::UnitZ())).vec();
  const Vec3 t2 = sphere::parallel_transport(a, b, TangentVector(a, Vec3::UnitY())).vec();
  EXPECT_NEAR((t3 - Vec3::UnitZ()).norm(), 0.0, 1e-15);
  EXPECT_NEAR((t2 + Vec3::UnitX()).norm(), 0.0, 1e-15);
}

TEST(Sphere, LogHasGeodesicLengthNotChordLength) {
  const UnitNormal a(Vec3::UnitZ());
  const UnitNormal b(Vec3(1.0, 0.0, 1.0));
  EXPECT_NEAR(sphere::log_map(a, b).norm(), std::numbers::pi / 4.0, 1e-15);
  EXPECT_NEAR((sphere::log_map(a, b).vec().normalized() - Vec3::UnitX()).norm(), 0.0, 1e-15);
}

TEST(Sphere, NearbyPointsKeepAccuracy) {
  const UnitNormal a(Vec3::UnitZ());
  const double d = 1e-9;
  const UnitNormal b(Vec3(std::sin(d), 0.0, std::cos(d)));
  EXPECT_NEAR(sphere::log_map(a, b).norm(), d, 1e-22);
  const TangentVector xi(a, Vec3(0.3, -2.0, 0.0));
  const TangentVector t = sphere::parallel_transport(a, b, xi);
  EXPECT_NEAR(t.norm(), xi.norm(), 1e-12);
  EXPECT_NEAR(t.vec().dot(b.vec()), 0.0, 1e-15);
}

TEST(Sphere, AntipodalPointsAreRejected) {
  const UnitNormal a(Vec3(0.3, -0.4, 0.5));
  const UnitNormal b(-a.vec());
  EXPECT_THROW(sphere::log_map(a, b), tvn::AntipodalPoints);
  EXPECT_THROW(sphere::parallel_transport(a, b, TangentVector(a, Vec3::UnitX())), tvn::AntipodalPoints);
  EXPECT_THROW(sphere::parallel_transport_rotation(a, b, TangentVector(a, Vec3::UnitX())),
               tvn::AntipodalPoints);
  EXPECT_NEAR(sphere::geodesic_distance(a, b), std::numbers::pi, 1e-7);
}

TEST(Sphere, UnitNormalRejectsZero) {
  EXPECT_THROW(UnitNormal(Vec3::Zero()), std::invalid_argument);
  EXPECT_THROW(UnitNormal(Vec3(NAN, 0.0, 1.0)), std::invalid_argument);
  EXPECT_NEAR(UnitNormal(Vec3(3.0, 4.0, 0.0)).vec().norm(), 1.0, 1e-16);
}

}  // namespace
