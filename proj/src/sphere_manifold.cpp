#include "tvn/sphere_manifold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tvn/errors.hpp"

namespace tvn {

UnitNormal::UnitNormal(const Vec3& v) {
  const double len = v.norm();
  if (!(len > 0.0) || !std::isfinite(len))
    throw std::invalid_argument("UnitNormal: zero or non-finite vector");
  v_ = v / len;
}

TangentVector::TangentVector(const UnitNormal& base, const Vec3& w)
    : base_(base), w_(w - base.vec().dot(w) * base.vec()) {}

namespace sphere {

namespace {

double clamped_dot(const UnitNormal& a, const UnitNormal& b) {
  return std::clamp(a.vec().dot(b.vec()), -1.0, 1.0);
}

void require_not_antipodal(const UnitNormal& a, const UnitNormal& b) {
  if (1.0 + a.vec().dot(b.vec()) <= kAntipodalTolerance) throw AntipodalPoints();
}

}  // namespace

double geodesic_distance(const UnitNormal& a, const UnitNormal& b) {
  return std::acos(clamped_dot(a, b));
}

UnitNormal geodesic(const UnitNormal& n, const TangentVector& xi, double t) {
  const double speed = xi.norm();
  if (speed < kZeroTangent) return n;
  const double angle = t * speed;
  return UnitNormal(std::cos(angle) * n.vec() + std::sin(angle) * (xi.vec() / speed));
}

UnitNormal exp_map(const UnitNormal& n, const TangentVector& xi) { return geodesic(n, xi, 1.0); }

TangentVector log_map(const UnitNormal& n, const UnitNormal& n_prime) {
  require_not_antipodal(n, n_prime);
  const Vec3 direction = n_prime.vec() - n.vec().dot(n_prime.vec()) * n.vec();
  const double len = direction.norm();
  if (len == 0.0) return TangentVector::zero(n);
  // For nearby points arccos loses accuracy; atan2 of (|sin|, cos) does not.
  const double d = std::atan2(len, n.vec().dot(n_prime.vec()));
  return {n, (d / len) * direction};
}

TangentVector parallel_transport(const UnitNormal& n, const UnitNormal& n_prime,
                                 const TangentVector& xi) {
  require_not_antipodal(n, n_prime);
  const TangentVector v = log_map(n, n_prime);
  const double d = v.norm();
  if (d < kSmallDistance) return {n_prime, xi.vec()};
  const TangentVector w = log_map(n_prime, n);
  const Vec3 out = xi.vec() - (xi.vec().dot(v.vec()) / (d * d)) * (v.vec() + w.vec());
  return {n_prime, out};
}

TangentVector parallel_transport_rotation(const UnitNormal& n, const UnitNormal& n_prime,
                                          const TangentVector& xi) {
  require_not_antipodal(n, n_prime);
  const TangentVector v = log_map(n, n_prime);
  const double d = v.norm();
  if (d < kSmallDistance) return {n_prime, xi.vec()};
  const Vec3 u = v.vec() / d;
  const Vec3 out = xi.vec() + (std::cos(d) * u - u - std::sin(d) * n.vec()) * u.dot(xi.vec());
  return {n_prime, out};
}

}  // namespace sphere
}  // namespace tvn
