#pragma once

// Truncated bivariate Taylor expansions ("jets") in the chart parameters
// (theta, phi). A Jet<N> stores the Taylor coefficients c_ij of
// f(theta0 + u, phi0 + v) = sum_{i+j<=N} c_ij u^i v^j, which gives exact
// parametric derivatives up to order N of anything built from +, -, *, /
// and the elementary functions below.

#include <array>
#include <cmath>
#include <cstddef>

#include <Eigen/Dense>

namespace tvn {

namespace jet_detail {

constexpr int coeff_count(int order) { return (order + 1) * (order + 2) / 2; }

// Coefficients are stored by total degree: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
constexpr int index_of(int i, int j) {
  const int d = i + j;
  return d * (d + 1) / 2 + j;
}

}  // namespace jet_detail

template <int N>
class Jet {
  static_assert(N >= 0 && N <= 3, "jets are supported up to order 3");

 public:
  static constexpr int kOrder = N;
  static constexpr int kSize = jet_detail::coeff_count(N);

  constexpr Jet() : c_{} {}
  constexpr Jet(double value) : c_{} { c_[0] = value; }  // NOLINT(implicit)

  /// The independent variable theta (or phi) expanded around `at`.
  static Jet theta(double at) {
    Jet j(at);
    if constexpr (N >= 1) j.c_[jet_detail::index_of(1, 0)] = 1.0;
    return j;
  }
  static Jet phi(double at) {
    Jet j(at);
    if constexpr (N >= 1) j.c_[jet_detail::index_of(0, 1)] = 1.0;
    return j;
  }

  double value() const { return c_[0]; }

  /// Taylor coefficient of u^i v^j.
  double coeff(int i, int j) const {
    return (i + j <= N) ? c_[jet_detail::index_of(i, j)] : 0.0;
  }
  double& coeff_ref(int i, int j) { return c_[jet_detail::index_of(i, j)]; }

  double& operator[](int k) { return c_[k]; }
  double operator[](int k) const { return c_[k]; }

  /// Partial derivative d^{i+j} f / dtheta^i dphi^j at the expansion point.
  double derivative(int i, int j) const {
    return coeff(i, j) * factorial(i) * factorial(j);
  }

  Jet<(N > 0 ? N - 1 : 0)> d_theta() const {
    Jet<(N > 0 ? N - 1 : 0)> out;
    if constexpr (N > 0) {
      for (int d = 0; d < N; ++d)
        for (int j = 0; j <= d; ++j) {
          const int i = d - j;
          out.coeff_ref(i, j) = (i + 1) * coeff(i + 1, j);
        }
    }
    return out;
  }
  Jet<(N > 0 ? N - 1 : 0)> d_phi() const {
    Jet<(N > 0 ? N - 1 : 0)> out;
    if constexpr (N > 0) {
      for (int d = 0; d < N; ++d)
        for (int j = 0; j <= d; ++j) {
          const int i = d - j;
          out.coeff_ref(i, j) = (j + 1) * coeff(i, j + 1);
        }
    }
    return out;
  }

  /// Drops coefficients above order M.
  template <int M>
  Jet<M> truncate() const {
    static_assert(M <= N);
    Jet<M> out;
    for (int k = 0; k < Jet<M>::kSize; ++k) out[k] = c_[k];
    return out;
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (int k = 0; k < kSize; ++k) c_[k] *= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) {
    a.c_[0] += s;
    return a;
  }
  friend Jet operator+(double s, Jet a) { return a + s; }
  friend Jet operator-(Jet a, double s) {
    a.c_[0] -= s;
    return a;
  }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet out;
    for (int d1 = 0; d1 <= N; ++d1)
      for (int j1 = 0; j1 <= d1; ++j1) {
        const double av = a.c_[jet_detail::index_of(d1 - j1, j1)];
        if (av == 0.0) continue;
        for (int d2 = 0; d1 + d2 <= N; ++d2)
          for (int j2 = 0; j2 <= d2; ++j2)
            out.c_[jet_detail::index_of(d1 - j1 + d2 - j2, j1 + j2)] +=
                av * b.c_[jet_detail::index_of(d2 - j2, j2)];
      }
    return out;
  }

  /// f(a) given the Taylor coefficients f^(k)(a0)/k!, k = 0..N.
  Jet compose(const std::array<double, N + 1>& taylor) const {
    Jet h = *this;
    h.c_[0] = 0.0;
    Jet out(taylor[0]);
    Jet power = h;
    for (int k = 1; k <= N; ++k) {
      out += power * taylor[k];
      if (k < N) power = power * h;
    }
    return out;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * inverse(b); }
  friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
  friend Jet operator/(double s, const Jet& b) { return inverse(b) * s; }

  friend Jet inverse(const Jet& a) {
    const double x = a.value();
    std::array<double, N + 1> t{};
    double p = 1.0 / x;
    for (int k = 0; k <= N; ++k) {
      t[k] = p;
      p *= -1.0 / x;
    }
    return a.compose(t);
  }

  friend Jet sqrt(const Jet& a) {
    const double x = a.value();
    const double s = std::sqrt(x);
    std::array<double, N + 1> t{};
    // binomial series of (x + h)^(1/2)
    double coef = s;
    for (int k = 0; k <= N; ++k) {
      t[k] = coef;
      coef *= (0.5 - k) / ((k + 1) * x);
    }
    return a.compose(t);
  }

  friend Jet sin(const Jet& a) {
    const double s = std::sin(a.value());
    const double c = std::cos(a.value());
    const std::array<double, 4> all{s, c, -s / 2.0, -c / 6.0};
    std::array<double, N + 1> t{};
    for (int k = 0; k <= N; ++k) t[k] = all[k];
    return a.compose(t);
  }

  friend Jet cos(const Jet& a) {
    const double s = std::sin(a.value());
    const double c = std::cos(a.value());
    const std::array<double, 4> all{c, -s, -c / 2.0, s / 6.0};
    std::array<double, N + 1> t{};
    for (int k = 0; k <= N; ++k) t[k] = all[k];
    return a.compose(t);
  }

 private:
  static constexpr double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  }

  std::array<double, kSize> c_;
};

template <int N>
using JetVec3 = std::array<Jet<N>, 3>;

template <int N>
Jet<N> dot(const JetVec3<N>& a, const JetVec3<N>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <int N>
JetVec3<N> cross(const JetVec3<N>& a, const JetVec3<N>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

template <int N>
JetVec3<N> operator+(const JetVec3<N>& a, const JetVec3<N>& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

template <int N>
JetVec3<N> operator-(const JetVec3<N>& a, const JetVec3<N>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

template <int N>
JetVec3<N> operator*(const Jet<N>& s, const JetVec3<N>& a) {
  return {s * a[0], s * a[1], s * a[2]};
}

template <int N>
JetVec3<N> operator*(double s, const JetVec3<N>& a) {
  return {a[0] * s, a[1] * s, a[2] * s};
}

template <int N>
JetVec3<N> normalized(const JetVec3<N>& a) {
  const Jet<N> inv_len = inverse(sqrt(dot(a, a)));
  return inv_len * a;
}

template <int N>
JetVec3<(N > 0 ? N - 1 : 0)> d_theta(const JetVec3<N>& a) {
  return {a[0].d_theta(), a[1].d_theta(), a[2].d_theta()};
}

template <int N>
JetVec3<(N > 0 ? N - 1 : 0)> d_phi(const JetVec3<N>& a) {
  return {a[0].d_phi(), a[1].d_phi(), a[2].d_phi()};
}

template <int M, int N>
JetVec3<M> truncate(const JetVec3<N>& a) {
  return {a[0].template truncate<M>(), a[1].template truncate<M>(),
          a[2].template truncate<M>()};
}

template <int N>
Eigen::Vector3d value_of(const JetVec3<N>& a) {
  return {a[0].value(), a[1].value(), a[2].value()};
}

template <int N>
JetVec3<N> constant_jet(const Eigen::Vector3d& v) {
  return {Jet<N>(v.x()), Jet<N>(v.y()), Jet<N>(v.z())};
}

/// R * a for a constant matrix R.
template <int N>
JetVec3<N> apply(const Eigen::Matrix3d& r, const JetVec3<N>& a) {
  JetVec3<N> out;
  for (int i = 0; i < 3; ++i)
    out[i] = a[0] * r(i, 0) + a[1] * r(i, 1) + a[2] * r(i, 2);
  return out;
}

}  // namespace tvn
