#pragma once

// Real orthonormal spherical harmonics on the unit sphere, parametrized by
// polar angle theta in (0, pi) and azimuth phi:
//   Y_l0  = Pbar_l0(cos theta)
//   Y_lm  = sqrt(2) Pbar_lm(cos theta) cos(m phi)    (m > 0)
//   Y_l-m = sqrt(2) Pbar_lm(cos theta) sin(m phi)    (m > 0)
// with Pbar the 4pi-orthonormal associated Legendre functions without the
// Condon-Shortley phase. Y_00 = 1/sqrt(4 pi).

#include <cstddef>
#include <vector>

#include "tvn/jet.hpp"

namespace tvn {

/// Flat index of (l, m) with -l <= m <= l: l^2 + l + m.
constexpr std::size_t harmonic_index(int l, int m) {
  return static_cast<std::size_t>(l * l + l + m);
}
constexpr std::size_t harmonic_count(int degree) {
  return static_cast<std::size_t>((degree + 1) * (degree + 1));
}

struct HarmonicLm {
  int l;
  int m;
};
HarmonicLm harmonic_lm(std::size_t index);

/// All Y_lm for l <= degree as order-N jets around (theta, phi), in
/// harmonic_index order.
template <int N>
std::vector<Jet<N>> spherical_harmonics(int degree, double theta, double phi);

/// Values only.
std::vector<double> spherical_harmonic_values(int degree, double theta, double phi);

/// A real function on the sphere sum_lm c_lm Y_lm.
class HarmonicExpansion {
 public:
  HarmonicExpansion() = default;
  explicit HarmonicExpansion(int degree) : coeffs_(harmonic_count(degree), 0.0), degree_(degree) {}
  /// `coeffs.size()` must be a perfect square (L+1)^2.
  explicit HarmonicExpansion(std::vector<double> coeffs);

  int degree() const { return degree_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  std::vector<double>& coefficients() { return coeffs_; }

  double& operator()(int l, int m) { return coeffs_.at(harmonic_index(l, m)); }
  double operator()(int l, int m) const { return coeffs_.at(harmonic_index(l, m)); }

  /// Copy padded with zeros (or truncated) to the given degree.
  HarmonicExpansion resized(int degree) const;

  template <int N>
  Jet<N> evaluate(double theta, double phi) const;
  double value(double theta, double phi) const;

  /// The constant function c on the sphere.
  static HarmonicExpansion constant(double c);

  bool operator==(const HarmonicExpansion&) const = default;

 private:
  std::vector<double> coeffs_{0.0};
  int degree_ = 0;
};

}  // namespace tvn
