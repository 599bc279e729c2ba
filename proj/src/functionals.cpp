#include "tvn/functionals.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "tvn/errors.hpp"
#include "tvn/numeric.hpp"

namespace tvn {

namespace {

template <class F>
double integrate(std::span<const SurfaceSample> samples, F&& integrand) {
  CompensatedSum sum;
  for (const auto& s : samples) sum += integrand(s) * s.area_weight;
  return sum.value();
}

}  // namespace

double tv_integrand(const SurfaceSample& s) { return std::hypot(s.k1, s.k2); }

double tv_integrand_frame(const SurfaceSample& s) {
  return std::sqrt(s.dn_xi(0).squaredNorm() + s.dn_xi(1).squaredNorm());
}

double tv_of_normal(std::span<const SurfaceSample> samples) {
  return integrate(samples, tv_integrand);
}

double tv_of_normal_frame(std::span<const SurfaceSample> samples) {
  return integrate(samples, tv_integrand_frame);
}

double tv_evaluation_gap(std::span<const SurfaceSample> samples) {
  double gap = 0.0;
  for (const auto& s : samples) gap = std::max(gap, std::abs(tv_integrand(s) - tv_integrand_frame(s)));
  return gap;
}

double total_curvature(std::span<const SurfaceSample> samples) {
  return integrate(samples, [](const SurfaceSample& s) { return s.k1 * s.k1 + s.k2 * s.k2; });
}

double total_gauss(std::span<const SurfaceSample> samples) {
  return integrate(samples, [](const SurfaceSample& s) { return s.k1 * s.k2; });
}

double total_abs_gauss(std::span<const SurfaceSample> samples) {
  return integrate(samples, [](const SurfaceSample& s) { return std::abs(s.k1 * s.k2); });
}

double gauss_bonnet_residual(std::span<const SurfaceSample> samples) {
  return std::abs(total_gauss(samples) - 4.0 * std::numbers::pi);
}

FunctionalReport evaluate_functionals(std::span<const SurfaceSample> samples) {
  FunctionalReport r;
  r.tv_normal = tv_of_normal(samples);
  r.total_curvature = total_curvature(samples);
  r.total_abs_gauss = total_abs_gauss(samples);
  r.gauss_bonnet_residual = gauss_bonnet_residual(samples);
  r.area = area(samples);
  r.volume = volume(samples);
  return r;
}

FourierCurve::FourierCurve(Vec2 center, std::vector<Vec2> cos_terms, std::vector<Vec2> sin_terms)
    : center_(std::move(center)), cos_(std::move(cos_terms)), sin_(std::move(sin_terms)) {
  if (cos_.size() != sin_.size())
    throw std::invalid_argument("FourierCurve: cosine and sine term counts differ");
}

FourierCurve FourierCurve::circle(double r) { return ellipse(r, r); }

FourierCurve FourierCurve::ellipse(double a, double b) {
  return {Vec2::Zero(), {Vec2(a, 0.0)}, {Vec2(0.0, b)}};
}

FourierCurve FourierCurve::limacon(double a, double b) {
  // (a + b cos t)(cos t, sin t) = (b/2, 0) + (a, 0) cos t + (0, a) sin t
  //                               + (b/2, 0) cos 2t + (0, b/2) sin 2t
  return {Vec2(0.5 * b, 0.0), {Vec2(a, 0.0), Vec2(0.5 * b, 0.0)}, {Vec2(0.0, a), Vec2(0.0, 0.5 * b)}};
}

FourierCurve::Vec2 FourierCurve::position(double t) const { return derivative(t, 0); }

FourierCurve::Vec2 FourierCurve::derivative(double t, int order) const {
  Vec2 out = order == 0 ? center_ : Vec2::Zero();
  for (std::size_t i = 0; i < cos_.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    // d^order/dt^order of cos(kt) and sin(kt) via a phase shift
    const double scale = std::pow(k, order);
    const double shift = order * std::numbers::pi / 2.0;
    out += scale * (std::cos(k * t + shift) * cos_[i] + std::sin(k * t + shift) * sin_[i]);
  }
  return out;
}

namespace {

template <class F>
double curve_integral(const FourierCurve& curve, int nodes, F&& f) {
  if (nodes < 3) throw std::invalid_argument("curve quadrature needs at least 3 nodes");
  const double dt = 2.0 * std::numbers::pi / nodes;
  CompensatedSum sum;
  for (int i = 0; i < nodes; ++i) {
    const double t = i * dt;
    const auto d1 = curve.derivative(t, 1);
    const auto d2 = curve.derivative(t, 2);
    const double speed = d1.norm();
    if (speed < 1e-12) {
      std::ostringstream msg;
      msg << "curve speed " << speed << " at t = " << t;
      throw DegenerateCurve(msg.str());
    }
    // k |x'| = (x' x x'') / |x'|^2
    sum += f((d1.x() * d2.y() - d1.y() * d2.x()) / (speed * speed)) * dt;
  }
  return sum.value();
}

}  // namespace

double curve_total_abs_curvature(const FourierCurve& curve, int nodes) {
  return curve_integral(curve, nodes, [](double v) { return std::abs(v); });
}

double curve_total_signed_curvature(const FourierCurve& curve, int nodes) {
  return curve_integral(curve, nodes, [](double v) { return v; });
}

}  // namespace tvn
