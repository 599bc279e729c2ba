#include <cmath>
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>

#include "tvn/errors.hpp"
#include "tvn/surface.hpp"

using std::numbers::pi;
using tvn::Vec3;

namespace {

// Principal curvatures of the ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 at a
// surface point, from the classical closed forms for K and H.
std::pair<double, double> ellipsoid_curvatures(const Vec3& axes, const Vec3& x) {
  const double a2 = axes[0] * axes[0], b2 = axes[1] * axes[1], c2 = axes[2] * axes[2];
  const double h = std::sqrt(x[0] * x[0] / (a2 * a2) + x[1] * x[1] / (b2 * b2) + x[2] * x[2] / (c2 * c2));
  const double k = 1.0 / (a2 * b2 * c2 * std::pow(h, 4));
  const double mean = (a2 + b2 + c2 - x.squaredNorm()) / (2.0 * a2 * b2 * c2 * std::pow(h, 3));
  const double disc = std::sqrt(std::max(0.0, mean * mean - k));
  return {mean + disc, mean - disc};
}

// Curvatures from the first and second fundamental forms, with every
// derivative of the position taken by finite differences.
std::pair<double, double> fd_curvatures(const tvn::SurfaceChart& chart, double t, double p) {
  const double h = 1e-4;
  auto x = [&](double a, double b) { return chart.position(a, b); };
  const Vec3 xt = (x(t + h, p) - x(t - h, p)) / (2 * h);
  const Vec3 xp = (x(t, p + h) - x(t, p - h)) / (2 * h);
  const Vec3 xtt = (x(t + h, p) - 2 * x(t, p) + x(t - h, p)) / (h * h);
  const Vec3 xpp = (x(t, p + h) - 2 * x(t, p) + x(t, p - h)) / (h * h);
  const Vec3 xtp = (x(t + h, p + h) - x(t + h, p - h) - x(t - h, p + h) + x(t - h, p - h)) / (4 * h * h);
  Vec3 n = xt.cross(xp).normalized();
  if (n.dot(x(t, p)) < 0) n = -n;
  const double e = xt.dot(xt), f = xt.dot(xp), g = xp.dot(xp);
  // Sign so that the outward-normal sphere has positive curvature.
  const double l = -xtt.dot(n), m = -xtp.dot(n), nn = -xpp.dot(n);
  const double k = (l * nn - m * m) / (e * g - f * f);
  const double mean = (e * nn - 2 * f * m + g * l) / (2 * (e * g - f * f));
  const double disc = std::sqrt(std::max(0.0, mean * mean - k));
  return {mean + disc, mean - disc};
}

tvn::SurfaceChart bumpy_chart() {
  tvn::HarmonicExpansion rho = tvn::HarmonicExpansion::constant(1.0).resized(3);
  rho(2, 0) = 0.15;
  rho(3, 2) = 0.15;
  rho(1, -1) = 0.05;
  return tvn::SurfaceChart::radial(rho);
}

void expect_frame_orthonormal(const tvn::SurfaceSample& s) {
  const Vec3& e1 = s.frame[0].vec();
  const Vec3& e2 = s.frame[1].vec();
  const Vec3& n = s.normal.vec();
  EXPECT_NEAR(e1.norm(), 1.0, 1e-12);
  EXPECT_NEAR(e2.norm(), 1.0, 1e-12);
  EXPECT_NEAR(e1.dot(e2), 0.0, 1e-12);
  EXPECT_NEAR(e1.dot(n), 0.0, 1e-12);
  EXPECT_NEAR(e2.dot(n), 0.0, 1e-12);
}

TEST(Surface, SphereGeometry) {
  const double r = 1.7;
  const tvn::QuadratureGrid grid(16, 32);
  const auto samples = tvn::sample(tvn::SurfaceChart::sphere(r), grid);
  for (const auto& s : samples) {
    EXPECT_NEAR(s.k1, 1.0 / r, 1e-12);
    EXPECT_NEAR(s.k2, 1.0 / r, 1e-12);
    EXPECT_NEAR((s.normal.vec() - s.position / r).norm(), 0.0, 1e-13);
    EXPECT_NEAR((s.dn * s.normal.vec()).norm(), 0.0, 1e-12);
    expect_frame_orthonormal(s);
  }
  EXPECT_NEAR(tvn::area(samples), 4 * pi * r * r, 1e-12);
  EXPECT_NEAR(tvn::volume(samples), 4.0 / 3.0 * pi * r * r * r, 1e-12);
}

TEST(Surface, EllipsoidCurvaturesOnTheAxes) {
  // At (a, 0, 0) the principal curvatures are a/b^2 and a/c^2.
  const Vec3 axes(2.0, 1.0, 0.5);
  const auto chart = tvn::SurfaceChart::ellipsoid(axes[0], axes[1], axes[2]);
  const auto s = tvn::sample_point(chart, pi / 2, 0.0);
  EXPECT_NEAR((s.position - Vec3(2, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(s.k1, 8.0, 1e-12);
  EXPECT_NEAR(s.k2, 2.0, 1e-12);
  // At (0, b, 0): b/a^2 and b/c^2.
  const auto t = tvn::sample_point(chart, pi / 2, pi / 2);
  EXPECT_NEAR(t.k1, 4.0, 1e-12);
  EXPECT_NEAR(t.k2, 0.25, 1e-12);
  const auto u = tvn::sample_point(tvn::SurfaceChart::ellipsoid(2, 1, 1), pi / 2, 0.0);
  EXPECT_NEAR(u.k1, 2.0, 1e-12);
  EXPECT_NEAR(u.k2, 2.0, 1e-12);
}

TEST(Surface, EllipsoidCurvaturesEverywhere) {
  const Vec3 axes(1.3, 0.8, 1.9);
  const auto chart = tvn::SurfaceChart::ellipsoid(axes[0], axes[1], axes[2]);
  const tvn::QuadratureGrid grid(12, 24);
  for (const auto& s : tvn::sample(chart, grid)) {
    const auto [k1, k2] = ellipsoid_curvatures(axes, s.position);
    EXPECT_NEAR(s.k1, k1, 1e-11);
    EXPECT_NEAR(s.k2, k2, 1e-11);
    EXPECT_NEAR(s.shape_op(0, 1), s.shape_op(1, 0), 1e-11);
    expect_frame_orthonormal(s);
  }
}

TEST(Surface, SpheroidAreaAndEllipsoidVolume) {
  // Prolate spheroid a = b < c: 2 pi a^2 (1 + c/(a e) asin(e)).
  const double a = 1.0, c = 1.6;
  const double e = std::sqrt(1 - a * a / (c * c));
  const double exact = 2 * pi * a * a * (1 + c / (a * e) * std::asin(e));
  const auto chart = tvn::SurfaceChart::ellipsoid(a, a, c);
  EXPECT_NEAR(tvn::area(chart, tvn::QuadratureGrid(48, 96)), exact, 1e-10);
  const auto tri = tvn::SurfaceChart::ellipsoid(1.2, 0.7, 1.9);
  EXPECT_NEAR(tvn::volume(tri, tvn::QuadratureGrid(16, 32)), 4.0 / 3.0 * pi * 1.2 * 0.7 * 1.9, 1e-12);
}

TEST(Surface, RadialChartCurvaturesMatchFundamentalForms) {
  const auto chart = bumpy_chart();
  for (double t : {0.3, 1.1, 2.0, 2.9})
    for (double p : {0.0, 1.3, 4.4}) {
      const auto s = tvn::sample_point(chart, t, p);
      const auto [k1, k2] = fd_curvatures(chart, t, p);
      EXPECT_NEAR(s.k1, k1, 1e-5) << t << "," << p;
      EXPECT_NEAR(s.k2, k2, 1e-5) << t << "," << p;
      EXPECT_NEAR(s.shape_op(0, 1), s.shape_op(1, 0), 1e-10);
      expect_frame_orthonormal(s);
    }
}

TEST(Surface, RigidMotionAndScaling) {
  const auto chart = bumpy_chart();
  const tvn::Mat3 rot = Eigen::AngleAxisd(0.7, Vec3(1, 2, -1).normalized()).toRotationMatrix();
  const tvn::QuadratureGrid grid(20, 40);
  const auto base = tvn::sample(chart, grid);
  const auto moved = tvn::sample(chart.rotated(rot).scaled(2.0), grid);
  for (std::size_t k = 0; k < base.size(); ++k) {
    EXPECT_NEAR(moved[k].k1, base[k].k1 / 2, 1e-12);
    EXPECT_NEAR(moved[k].k2, base[k].k2 / 2, 1e-12);
    EXPECT_NEAR((moved[k].normal.vec() - rot * base[k].normal.vec()).norm(), 0.0, 1e-12);
  }
  EXPECT_NEAR(tvn::area(moved), 4 * tvn::area(base), 1e-11);
  EXPECT_NEAR(tvn::volume(moved), 8 * tvn::volume(base), 1e-11);
}

TEST(Surface, InvalidChartsAreRejected) {
  EXPECT_THROW(tvn::SurfaceChart::sphere(-1.0), tvn::InvalidChart);
  EXPECT_THROW(tvn::SurfaceChart::ellipsoid(1.0, 0.0, 1.0), tvn::InvalidChart);
  tvn::HarmonicExpansion rho = tvn::HarmonicExpansion::constant(0.2).resized(2);
  rho(2, 0) = 1.0;
  EXPECT_THROW(tvn::SurfaceChart::radial(rho), tvn::InvalidChart);
  tvn::ChartSpec spec;
  spec.kind = tvn::ChartSpec::Kind::radial;
  spec.terms = {{2, 3, 0.1}};
  EXPECT_THROW(tvn::build_chart(spec, tvn::QuadratureGrid(8, 16)), tvn::InvalidChart);
}

TEST(Surface, ChartSpecBuildsTheRadialGraph) {
  tvn::ChartSpec spec;
  spec.kind = tvn::ChartSpec::Kind::radial;
  spec.radius = 1.0;
  spec.terms = {{2, 0, 0.15}, {3, 2, 0.15}};
  const auto chart = tvn::build_chart(spec, tvn::QuadratureGrid(16, 32));
  const double t = 0.9, p = 0.6;
  const double c = std::cos(t), s = std::sin(t);
  const double rho = 1.0 + 0.15 * std::sqrt(5 / (16 * pi)) * (3 * c * c - 1) +
                     0.15 * std::sqrt(105 / (16 * pi)) * s * s * c * std::cos(2 * p);
  EXPECT_NEAR(chart.position(t, p).norm(), rho, 1e-14);
  EXPECT_EQ(spec.harmonic_degree(), 3);
}

TEST(Surface, CollapsingPerturbationsAreDetected) {
  const auto sphere = tvn::SurfaceChart::sphere(1.0);
  const tvn::QuadratureGrid grid(8, 16);
  const auto shrink = tvn::VectorField::affine(-tvn::Mat3::Identity(), Vec3::Zero());
  EXPECT_THROW(tvn::sample(sphere.perturbed(shrink, 1.0), grid), tvn::DegenerateMetric);
  EXPECT_THROW(tvn::perturb_chart(sphere, shrink, 2.0, grid), tvn::LostStarShape);
  EXPECT_NO_THROW(tvn::perturb_chart(sphere, shrink, 0.5, grid));
}

TEST(Surface, MeshExportRoundTrip) {
  const auto chart = bumpy_chart();
  const tvn::QuadratureGrid grid(24, 48);
  const auto path = std::filesystem::temp_directory_path() / "tvn_surface_test.obj";
  tvn::export_mesh(chart, grid, path);
  const auto mesh = tvn::read_mesh(path);
  std::filesystem::remove(path);
  EXPECT_EQ(mesh.vertices.size(), 24u * 48u + 2u);
  const auto direct = tvn::triangulate(chart, grid);
  ASSERT_EQ(mesh.faces.size(), direct.faces.size());
  for (std::size_t k = 0; k < mesh.vertices.size(); ++k)
    EXPECT_NEAR((mesh.vertices[k] - direct.vertices[k]).norm(), 0.0, 1e-15);
  // Flat triangles underestimate the area by O(h^2).
  const double exact = tvn::area(chart, grid);
  EXPECT_NEAR(tvn::mesh_area(mesh) / exact, 1.0, 2e-2);
  // Consistent outward orientation: signed volume is positive.
  double vol = 0.0;
  for (const auto& f : mesh.faces)
    vol += mesh.vertices[f[0]].dot(mesh.vertices[f[1]].cross(mesh.vertices[f[2]])) / 6.0;
  EXPECT_NEAR(vol / tvn::volume(chart, grid), 1.0, 3e-2);
  EXPECT_THROW(tvn::read_mesh("/nonexistent/dir/x.obj"), tvn::IoError);
}

}  // namespace
