#pragma once

// Closed-form Riemannian primitives on the unit sphere S^2 embedded in R^3,
// with the metric inherited from the ambient Euclidean inner product.

#include <Eigen/Dense>

namespace tvn {

using Vec3 = Eigen::Vector3d;

/// A point on S^2. The stored vector is renormalized on construction.
class UnitNormal {
 public:
  /// The north pole e_3.
  UnitNormal() : v_(0.0, 0.0, 1.0) {}
  /// Throws std::invalid_argument for a zero or non-finite vector.
  explicit UnitNormal(const Vec3& v);

  const Vec3& vec() const { return v_; }
  double operator[](int i) const { return v_[i]; }

 private:
  Vec3 v_;
};

/// A vector in the tangent plane of S^2 at `base`. The 3-vector is projected
/// onto the tangent plane on construction, so base . w == 0 up to rounding.
class TangentVector {
 public:
  TangentVector() : w_(Vec3::Zero()) {}
  TangentVector(const UnitNormal& base, const Vec3& w);
  static TangentVector zero(const UnitNormal& base) { return {base, Vec3::Zero()}; }

  const UnitNormal& base() const { return base_; }
  const Vec3& vec() const { return w_; }
  double norm() const { return w_.norm(); }

 private:
  UnitNormal base_;
  Vec3 w_;
};

namespace sphere {

/// 1 + n.n' below this value counts as antipodal.
inline constexpr double kAntipodalTolerance = 1e-10;
/// Tangent vectors shorter than this are treated as zero in exp/geodesic.
inline constexpr double kZeroTangent = 1e-14;
/// Below this geodesic distance transport reduces to re-projection.
inline constexpr double kSmallDistance = 1e-8;

/// arccos of the clamped inner product; symmetric, in [0, pi].
double geodesic_distance(const UnitNormal& a, const UnitNormal& b);

/// Great circle through n with initial velocity xi, evaluated at time t.
UnitNormal geodesic(const UnitNormal& n, const TangentVector& xi, double t);

UnitNormal exp_map(const UnitNormal& n, const TangentVector& xi);

/// Inverse of exp_map; |log_map(n, n')| equals the geodesic distance
/// (not sqrt(1 - n.n'), which is the norm of the unnormalized direction
/// only to first order). Throws AntipodalPoints when n' ~ -n.
TangentVector log_map(const UnitNormal& n, const UnitNormal& n_prime);

/// Parallel transport of xi from T_n S^2 to T_n' S^2 along the shortest
/// geodesic, using the log-map form
///   xi - <xi, log_n n'> / d^2 * (log_n n' + log_n' n).
TangentVector parallel_transport(const UnitNormal& n, const UnitNormal& n_prime,
                                 const TangentVector& xi);

/// The same transport written with the unit direction u of log_n n':
///   xi + (cos(d) u - u - sin(d) n) <u, xi>.
TangentVector parallel_transport_rotation(const UnitNormal& n, const UnitNormal& n_prime,
                                          const TangentVector& xi);

}  // namespace sphere
}  // namespace tvn
