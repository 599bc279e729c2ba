#include "tvn/spherical_harmonics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tvn {

HarmonicLm harmonic_lm(std::size_t index) {
  const int l = static_cast<int>(std::sqrt(static_cast<double>(index)));
  int ll = l;
  while (static_cast<std::size_t>((ll + 1) * (ll + 1)) <= index) ++ll;
  while (static_cast<std::size_t>(ll * ll) > index) --ll;
  return {ll, static_cast<int>(index) - ll * ll - ll};
}

template <int N>
std::vector<Jet<N>> spherical_harmonics(int degree, double theta, double phi) {
  if (degree < 0) throw std::invalid_argument("spherical_harmonics: negative degree");
  const Jet<N> th = Jet<N>::theta(theta);
  const Jet<N> ph = Jet<N>::phi(phi);
  const Jet<N> x = cos(th);
  const Jet<N> s = sin(th);

  std::vector<Jet<N>> out(harmonic_count(degree));

  std::vector<Jet<N>> cos_m(degree + 1), sin_m(degree + 1);
  for (int m = 0; m <= degree; ++m) {
    cos_m[m] = cos(ph * static_cast<double>(m));
    sin_m[m] = sin(ph * static_cast<double>(m));
  }

  // Pbar_mm by the diagonal recurrence, then upward in l for fixed m.
  Jet<N> p_mm(1.0 / std::sqrt(4.0 * std::numbers::pi));
  for (int m = 0; m <= degree; ++m) {
    if (m > 0) p_mm = p_mm * s * std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    Jet<N> p_prev;  // Pbar_{l-2,m}
    Jet<N> p_cur = p_mm;
    for (int l = m; l <= degree; ++l) {
      if (l == m + 1) {
        p_prev = p_cur;
        p_cur = x * p_mm * std::sqrt(2.0 * m + 3.0);
      } else if (l >= m + 2) {
        const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
        const double b = std::sqrt(((l - 1.0) * (l - 1.0) - m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        Jet<N> next = (x * p_cur - p_prev * b) * a;
        p_prev = p_cur;
        p_cur = next;
      }
      if (m == 0) {
        out[harmonic_index(l, 0)] = p_cur;
      } else {
        const Jet<N> scaled = p_cur * std::numbers::sqrt2;
        out[harmonic_index(l, m)] = scaled * cos_m[m];
        out[harmonic_index(l, -m)] = scaled * sin_m[m];
      }
    }
  }
  return out;
}

template std::vector<Jet<0>> spherical_harmonics<0>(int, double, double);
template std::vector<Jet<1>> spherical_harmonics<1>(int, double, double);
template std::vector<Jet<2>> spherical_harmonics<2>(int, double, double);
template std::vector<Jet<3>> spherical_harmonics<3>(int, double, double);

std::vector<double> spherical_harmonic_values(int degree, double theta, double phi) {
  const auto jets = spherical_harmonics<0>(degree, theta, phi);
  std::vector<double> out(jets.size());
  for (std::size_t i = 0; i < jets.size(); ++i) out[i] = jets[i].value();
  return out;
}

HarmonicExpansion::HarmonicExpansion(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(coeffs_.size()))));
  if (n < 1 || static_cast<std::size_t>(n * n) != coeffs_.size())
    throw std::invalid_argument("HarmonicExpansion: coefficient count is not (L+1)^2");
  degree_ = n - 1;
}

HarmonicExpansion HarmonicExpansion::resized(int degree) const {
  HarmonicExpansion out(degree);
  const std::size_t n = std::min(out.coeffs_.size(), coeffs_.size());
  for (std::size_t i = 0; i < n; ++i) out.coeffs_[i] = coeffs_[i];
  return out;
}

template <int N>
Jet<N> HarmonicExpansion::evaluate(double theta, double phi) const {
  const auto basis = spherical_harmonics<N>(degree_, theta, phi);
  Jet<N> out;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (coeffs_[i] != 0.0) out += basis[i] * coeffs_[i];
  return out;
}

template Jet<0> HarmonicExpansion::evaluate<0>(double, double) const;
template Jet<1> HarmonicExpansion::evaluate<1>(double, double) const;
template Jet<2> HarmonicExpansion::evaluate<2>(double, double) const;
template Jet<3> HarmonicExpansion::evaluate<3>(double, double) const;

double HarmonicExpansion::value(double theta, double phi) const {
  return evaluate<0>(theta, phi).value();
}

HarmonicExpansion HarmonicExpansion::constant(double c) {
  HarmonicExpansion out(0);
  out(0, 0) = c * std::sqrt(4.0 * std::numbers::pi);
  return out;
}

}  // namespace tvn
