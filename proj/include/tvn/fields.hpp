#pragma once

// Vector and scalar fields that can be evaluated along a chart as jets in
// the chart parameters. Ambient fields are composed with the embedding;
// harmonic fields live directly on the parameter sphere; the normal-based
// fields use the normal of the chart they are evaluated on.

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tvn/jet.hpp"
#include "tvn/spherical_harmonics.hpp"

namespace tvn {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Embedding jet x(theta, phi) around one parameter point. valid_order is
/// the highest order whose coefficients are exact (composing with a
/// normal-based perturbation costs one order).
struct ChartJet {
  JetVec3<3> x;
  int valid_order = 3;
};

struct ChartPoint {
  double theta = 0.0;
  double phi = 0.0;
  ChartJet chart;
};

/// Unit radial direction omega(theta, phi).
template <int N>
JetVec3<N> radial_direction(double theta, double phi);

/// Outward unit normal of the chart as an order-2 jet (exact to
/// chart.valid_order - 1).
JetVec3<2> normal_jet(const ChartJet& chart);

struct FieldJet {
  JetVec3<3> w;
  int valid_order = 3;
};

struct ScalarJet {
  Jet<3> g;
  int valid_order = 3;
};

/// Immutable vector field handle with value semantics.
class VectorField {
 public:
  class Impl;

  VectorField();  // zero field

  static VectorField zero();
  static VectorField constant(const Vec3& c);
  /// V(y) = A y + b.
  static VectorField affine(const Mat3& a, const Vec3& b);
  /// V(y) = sum_t amplitude_t * sin(frequency_t . y + phase_t).
  struct TrigTerm {
    Vec3 amplitude;
    Vec3 frequency;
    double phase = 0.0;
  };
  static VectorField trigonometric(std::vector<TrigTerm> terms);
  /// phi(theta, phi) * omega(theta, phi): a field along rays from the origin.
  static VectorField radial_harmonic(HarmonicExpansion phi);
  /// phi(theta, phi) * n(theta, phi) with n the normal of the evaluated chart.
  static VectorField normal_harmonic(HarmonicExpansion phi);
  /// The outward unit normal of the evaluated chart.
  static VectorField surface_normal();
  /// Tangential part W - (W.n) n of another field.
  static VectorField tangential_part(const VectorField& inner);

  VectorField operator+(const VectorField& other) const;
  VectorField operator*(double s) const;

  FieldJet evaluate(const ChartPoint& p) const;

  /// Whether the field is defined in the ambient space (value/jacobian usable).
  bool is_ambient() const;
  Vec3 value(const Vec3& y) const;
  Mat3 jacobian(const Vec3& y) const;
  /// d^2 V_k / dy_i dy_j as hessian(y)[k](i, j).
  std::array<Mat3, 3> hessian(const Vec3& y) const;

  /// Human-readable identifier used in CSV rows.
  std::string describe() const;

 private:
  explicit VectorField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

class ScalarField {
 public:
  class Impl;

  ScalarField();  // zero

  static ScalarField constant(double c);
  static ScalarField harmonic(HarmonicExpansion phi);
  /// g(y) = sum_t amplitude_t * sin(frequency_t . y + phase_t).
  struct TrigTerm {
    double amplitude;
    Vec3 frequency;
    double phase = 0.0;
  };
  static ScalarField trigonometric(std::vector<TrigTerm> terms);

  ScalarJet evaluate(const ChartPoint& p) const;

  bool is_ambient() const;
  double value(const Vec3& y) const;
  Vec3 gradient(const Vec3& y) const;

 private:
  explicit ScalarField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace tvn
