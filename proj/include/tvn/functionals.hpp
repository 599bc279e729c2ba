#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tvn/surface.hpp"

namespace tvn {

/// sqrt(k1^2 + k2^2) at one node.
double tv_integrand(const SurfaceSample& s);
/// sqrt(|(D n) xi_1|^2 + |(D n) xi_2|^2) at one node, from the frame.
double tv_integrand_frame(const SurfaceSample& s);

/// Integral of sqrt(k1^2 + k2^2): the total variation of the Gauss map.
double tv_of_normal(std::span<const SurfaceSample> samples);
/// Same integral evaluated through the tangent frame.
double tv_of_normal_frame(std::span<const SurfaceSample> samples);
/// Largest nodewise difference between the two integrands.
double tv_evaluation_gap(std::span<const SurfaceSample> samples);

/// Integral of k1^2 + k2^2.
double total_curvature(std::span<const SurfaceSample> samples);
/// Integral of k1 k2.
double total_gauss(std::span<const SurfaceSample> samples);
/// Integral of |k1 k2|.
double total_abs_gauss(std::span<const SurfaceSample> samples);
/// |integral of K - 4 pi| (zero for every genus-0 surface).
double gauss_bonnet_residual(std::span<const SurfaceSample> samples);

struct FunctionalReport {
  double tv_normal = 0.0;
  double total_curvature = 0.0;
  double total_abs_gauss = 0.0;
  double gauss_bonnet_residual = 0.0;
  double area = 0.0;
  double volume = 0.0;
};
FunctionalReport evaluate_functionals(std::span<const SurfaceSample> samples);

/// Closed planar curve x(t) = c + sum_k a_k cos(kt) + b_k sin(kt), t in [0, 2 pi).
class FourierCurve {
 public:
  using Vec2 = Eigen::Vector2d;

  FourierCurve(Vec2 center, std::vector<Vec2> cos_terms, std::vector<Vec2> sin_terms);

  static FourierCurve circle(double r);
  static FourierCurve ellipse(double a, double b);
  /// Polar limacon r(t) = a + b cos t; has an inner loop when b > a.
  static FourierCurve limacon(double a, double b);

  Vec2 position(double t) const;
  /// k-th derivative in t.
  Vec2 derivative(double t, int order) const;

 private:
  Vec2 center_;
  std::vector<Vec2> cos_;
  std::vector<Vec2> sin_;
};

/// Trapezoid rule for the integral of |k| ds with `nodes` uniform samples.
/// Throws DegenerateCurve if the speed drops below 1e-12 at a node.
double curve_total_abs_curvature(const FourierCurve& curve, int nodes);
/// Same for the signed curvature (2 pi times the turning number).
double curve_total_signed_curvature(const FourierCurve& curve, int nodes);

}  // namespace tvn
