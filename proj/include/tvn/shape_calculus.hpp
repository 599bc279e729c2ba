#pragma once

// Material and shape derivatives of surface quantities under perturbations
// of identity x -> x + eps V(x). Tangential derivatives of fields along the
// surface are taken in the chart parameters and converted with the dual
// basis P = (X^T X)^{-1} X^T, X = [x_theta, x_phi]: D_Gamma F = [F_theta, F_phi] P.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tvn/fields.hpp"
#include "tvn/surface.hpp"

namespace tvn {

/// Rows of the dual basis P as first-order jets (needed to differentiate
/// quantities that contain P).
struct DualBasisJet {
  JetVec3<1> p1;
  JetVec3<1> p2;
};
DualBasisJet dual_basis_jet(const ChartJet& chart);

/// [f_theta, f_phi] P for a field along the chart.
Mat3 tangential_jacobian(const SurfaceSample& s, const Vec3& f_theta, const Vec3& f_phi);

/// First variation of the node geometry in direction V.
struct NodeVariation {
  Vec3 v = Vec3::Zero();
  Mat3 grad_v = Mat3::Zero();  // D_Gamma V
  double div_v = 0.0;          // div_Gamma V = trace(D_Gamma V)
  Vec3 dn = Vec3::Zero();      // dn[V] = -(D_Gamma V)^T n
  std::array<Vec3, 2> dxi{Vec3::Zero(), Vec3::Zero()};
  // The three terms of d[(D_Gamma n) xi_i][V]:
  std::array<Vec3, 2> normal_term{Vec3::Zero(), Vec3::Zero()};  // D_Gamma(dn[V]) xi_i
  std::array<Vec3, 2> metric_term{Vec3::Zero(), Vec3::Zero()};  // -(D_Gamma n)(D_Gamma V) xi_i
  std::array<Vec3, 2> frame_term{Vec3::Zero(), Vec3::Zero()};   // (D_Gamma n) dxi_i[V]

  Vec3 d_dn_xi(int i) const { return normal_term[i] + metric_term[i] + frame_term[i]; }
};

/// Requires the chart jet and the field jet to be exact to order 2.
/// Linear in the field jet. Uses the sample's frame (which may be any
/// orthonormal tangent frame, not only the Gram-Schmidt one).
NodeVariation node_variation(const SurfaceSample& s, const FieldJet& w);
NodeVariation node_variation(const SurfaceSample& s, const VectorField& v);
std::vector<NodeVariation> node_variations(std::span<const SurfaceSample> samples,
                                           const VectorField& v);

std::vector<TangentVector> material_normal(std::span<const SurfaceSample> samples,
                                           const VectorField& v);
std::vector<std::array<Vec3, 2>> material_frame(std::span<const SurfaceSample> samples,
                                                const VectorField& v);
std::vector<std::array<Vec3, 2>> material_Dn_xi(std::span<const SurfaceSample> samples,
                                                const VectorField& v);

/// Default regularization of 1/g in the derivative of the TV integrand.
inline constexpr double kDefaultEpsReg = 1e-8;
/// g below this counts as flat when no regularization is requested.
inline constexpr double kFlatThreshold = 1e-10;

/// dg[V] for g = sqrt(k1^2 + k2^2):
///   (1/g_reg) sum_i <(D n) xi_i, d[(D n) xi_i][V]>, g_reg = sqrt(g^2 + eps_reg^2).
/// Throws FlatRegion if eps_reg == 0 and g <= kFlatThreshold.
double tv_integrand_variation(const SurfaceSample& s, const NodeVariation& var, double eps_reg);

/// integral of g div_Gamma V + dg[V].
double shape_derivative_surface_integral(std::span<const SurfaceSample> samples,
                                         std::span<const double> g, std::span<const double> dg,
                                         std::span<const NodeVariation> vars);
double shape_derivative_surface_integral(std::span<const SurfaceSample> samples,
                                         std::span<const double> g, std::span<const double> dg,
                                         const VectorField& v);

double area_shape_derivative(std::span<const SurfaceSample> samples, const VectorField& v);
/// integral of V . n.
double volume_shape_derivative(std::span<const SurfaceSample> samples, const VectorField& v);
/// Derivative of the integral of an ambient scalar field g (dg[V] = grad g . V).
double scalar_integral_shape_derivative(std::span<const SurfaceSample> samples,
                                        const ScalarField& g, const VectorField& v);
double scalar_integral(std::span<const SurfaceSample> samples, const ScalarField& g);

double tv_shape_derivative(std::span<const SurfaceSample> samples, const VectorField& v,
                           double eps_reg = kDefaultEpsReg);

/// Split of integral (1/g) sum_i <(D n) xi_i, d[(D n) xi_i]> by the three
/// terms of d[(D n) xi_i], plus the flux integral of V . n.
struct CurvatureVariationTerms {
  double normal_term = 0.0;
  double metric_term = 0.0;
  double frame_term = 0.0;
  double flux = 0.0;
};
CurvatureVariationTerms curvature_variation_terms(std::span<const SurfaceSample> samples,
                                                  const VectorField& v);

/// Both sides of
///   int a^T (D_Gamma V) b = int V.n [ -div_Gamma((a.n) b) + (a.n)(b.n)(k1+k2) + a^T (D_Gamma n) b ]
/// for a normal field V.
struct IdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual() const { return std::abs(lhs - rhs); }
};
IdentitySides normal_field_stokes(std::span<const SurfaceSample> samples, const VectorField& a,
                                  const VectorField& b, const VectorField& v);
/// Both sides of int c div_Gamma V = int V.n c (k1+k2) - int (D_Gamma c) V.
IdentitySides tangential_stokes(std::span<const SurfaceSample> samples, const ScalarField& c,
                                const VectorField& v);
/// |lhs - rhs| of normal_field_stokes.
double tangential_stokes_residual(std::span<const SurfaceSample> samples, const VectorField& a,
                                  const VectorField& b, const VectorField& v);

/// L2 norm of V over the surface.
double field_l2_norm(std::span<const SurfaceSample> samples, const VectorField& v);

/// |dL[V]| / (1 + |V|_L2) for L = TV + mu (area - A0) on sphere(r); mu defaults
/// to the stationary value -1/(sqrt(2) r).
double stationarity_residual(double r, const VectorField& v, const QuadratureGrid& grid,
                             std::optional<double> mu = std::nullopt);
/// Same with the enclosed volume as constraint; mu defaults to -sqrt(2)/r^2.
double volume_stationarity_residual(double r, const VectorField& v, const QuadratureGrid& grid,
                                    std::optional<double> mu = std::nullopt);

/// Surface gradient of g = sqrt(k1^2 + k2^2) (chart exact to order 3).
Vec3 tv_integrand_gradient(const SurfaceSample& s);

/// Value at the fixed point y of g_eps extended constantly along normals of
/// the perturbed surface (closest-point projection of y onto it).
double tv_integrand_normal_extension(const SurfaceChart& perturbed, const Vec3& y, double theta0,
                                     double phi0);

/// Central difference of the normally extended integrand at the node:
/// the local shape derivative g'[V].
double fd_local_tv_derivative(const SurfaceChart& chart, const VectorField& v, double theta,
                              double phi, double eps);

using ChartFunctional = std::function<double(const Samples&)>;

/// (F(T_eps Gamma) - F(T_-eps Gamma)) / (2 eps). Throws LostStarShape.
double fd_shape_derivative(const SurfaceChart& chart, const QuadratureGrid& grid,
                           const ChartFunctional& functional, const VectorField& v, double eps);

/// Gram-Schmidt of the pushed-forward frame: xi_i keeps its parametric
/// coordinates P xi_i and is mapped with the perturbed tangents.
std::array<Vec3, 2> pushforward_frame(const SurfaceSample& base, const std::array<Vec3, 2>& frame,
                                      const SurfaceSample& perturbed);

/// Central differences of the node quantities along the perturbation, using
/// the pushed-forward frame.
struct NodeDifference {
  Vec3 dn = Vec3::Zero();
  std::array<Vec3, 2> dxi{Vec3::Zero(), Vec3::Zero()};
  std::array<Vec3, 2> d_dn_xi{Vec3::Zero(), Vec3::Zero()};
  double dg = 0.0;
  double d_area_density = 0.0;  // d/deps |x_theta x x_phi| / |x_theta x x_phi|
};
NodeDifference fd_node_variation(const SurfaceChart& chart, const SurfaceSample& base,
                                 const VectorField& v, double eps);

}  // namespace tvn
