#include "tvn/shape_calculus.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tvn/errors.hpp"
#include "tvn/functionals.hpp"
#include "tvn/numeric.hpp"

namespace tvn {

namespace {

Vec3 gram_schmidt_second(const Vec3& e1, const Vec3& u) { return (u - u.dot(e1) * e1).normalized(); }

}  // namespace

DualBasisJet dual_basis_jet(const ChartJet& chart) {
  const JetVec3<1> xt = truncate<1>(d_theta(chart.x));
  const JetVec3<1> xp = truncate<1>(d_phi(chart.x));
  const Jet<1> g11 = dot(xt, xt);
  const Jet<1> g12 = dot(xt, xp);
  const Jet<1> g22 = dot(xp, xp);
  const Jet<1> inv_det = inverse(g11 * g22 - g12 * g12);
  // P = G^{-1} X^T, row a = sum_b (G^{-1})_ab x_b
  return {(g22 * inv_det) * xt - (g12 * inv_det) * xp,
          (g11 * inv_det) * xp - (g12 * inv_det) * xt};
}

Mat3 tangential_jacobian(const SurfaceSample& s, const Vec3& f_theta, const Vec3& f_phi) {
  Mat32 f;
  f.col(0) = f_theta;
  f.col(1) = f_phi;
  return f * s.dual;
}

NodeVariation node_variation(const SurfaceSample& s, const FieldJet& w) {
  NodeVariation out;
  const DualBasisJet p = dual_basis_jet(s.chart);
  const JetVec3<1> n = truncate<1>(normal_jet(s.chart));
  const JetVec3<1> wt = truncate<1>(d_theta(w.w));
  const JetVec3<1> wp = truncate<1>(d_phi(w.w));

  out.v = value_of(w.w);
  out.grad_v = tangential_jacobian(s, value_of(wt), value_of(wp));
  out.div_v = out.grad_v.trace();

  // dn = -(D_Gamma V)^T n = -(p1 (w_theta . n) + p2 (w_phi . n)), kept as a jet
  // so that its tangential derivative is available.
  const JetVec3<1> dn = -1.0 * (dot(wt, n) * p.p1 + dot(wp, n) * p.p2);
  out.dn = value_of(dn);
  const Mat3 grad_dn = tangential_jacobian(s, value_of(d_theta(dn)), value_of(d_phi(dn)));

  const Mat3& a = out.grad_v;
  const Vec3& xi1 = s.frame[0].vec();
  const Vec3& xi2 = s.frame[1].vec();
  out.dxi[0] = a * xi1 - xi1.dot(a * xi1) * xi1;
  out.dxi[1] = a * xi2 - xi2.dot(a * xi2) * xi2 - xi1.dot((a + a.transpose()) * xi2) * xi1;

  for (int i = 0; i < 2; ++i) {
    const Vec3& xi = s.frame[i].vec();
    out.normal_term[i] = grad_dn * xi;
    out.metric_term[i] = -(s.dn * (a * xi));
    out.frame_term[i] = s.dn * out.dxi[i];
  }
  return out;
}

NodeVariation node_variation(const SurfaceSample& s, const VectorField& v) {
  return node_variation(s, v.evaluate(s.point()));
}

std::vector<NodeVariation> node_variations(std::span<const SurfaceSample> samples,
                                           const VectorField& v) {
  std::vector<NodeVariation> out(samples.size());
  parallel_for(samples.size(), [&](std::size_t k) { out[k] = node_variation(samples[k], v); });
  return out;
}

std::vector<TangentVector> material_normal(std::span<const SurfaceSample> samples,
                                           const VectorField& v) {
  const auto vars = node_variations(samples, v);
  std::vector<TangentVector> out;
  out.reserve(vars.size());
  for (std::size_t k = 0; k < vars.size(); ++k) out.emplace_back(samples[k].normal, vars[k].dn);
  return out;
}

std::vector<std::array<Vec3, 2>> material_frame(std::span<const SurfaceSample> samples,
                                                const VectorField& v) {
  const auto vars = node_variations(samples, v);
  std::vector<std::array<Vec3, 2>> out(vars.size());
  for (std::size_t k = 0; k < vars.size(); ++k) out[k] = vars[k].dxi;
  return out;
}

std::vector<std::array<Vec3, 2>> material_Dn_xi(std::span<const SurfaceSample> samples,
                                                const VectorField& v) {
  const auto vars = node_variations(samples, v);
  std::vector<std::array<Vec3, 2>> out(vars.size());
  for (std::size_t k = 0; k < vars.size(); ++k) out[k] = {vars[k].d_dn_xi(0), vars[k].d_dn_xi(1)};
  return out;
}

double tv_integrand_variation(const SurfaceSample& s, const NodeVariation& var, double eps_reg) {
  const double g = tv_integrand_frame(s);
  if (eps_reg == 0.0 && g <= kFlatThreshold) {
    std::ostringstream msg;
    msg << "both principal curvatures vanish at (theta, phi) = (" << s.theta << ", " << s.phi
        << "); TV integrand not differentiable";
    throw FlatRegion(msg.str());
  }
  const double g_reg = std::sqrt(g * g + eps_reg * eps_reg);
  double acc = 0.0;
  for (int i = 0; i < 2; ++i) acc += s.dn_xi(i).dot(var.d_dn_xi(i));
  return acc / g_reg;
}

double shape_derivative_surface_integral(std::span<const SurfaceSample> samples,
                                         std::span<const double> g, std::span<const double> dg,
                                         std::span<const NodeVariation> vars) {
  CompensatedSum sum;
  for (std::size_t k = 0; k < samples.size(); ++k)
    sum += (g[k] * vars[k].div_v + dg[k]) * samples[k].area_weight;
  return sum.value();
}

double shape_derivative_surface_integral(std::span<const SurfaceSample> samples,
                                         std::span<const double> g, std::span<const double> dg,
                                         const VectorField& v) {
  return shape_derivative_surface_integral(samples, g, dg, node_variations(samples, v));
}

double area_shape_derivative(std::span<const SurfaceSample> samples, const VectorField& v) {
  CompensatedSum sum;
  for (const auto& s : samples) {
    const FieldJet w = v.evaluate(s.point());
    const Mat3 a = tangential_jacobian(s, value_of(d_theta(w.w)), value_of(d_phi(w.w)));
    sum += a.trace() * s.area_weight;
  }
  return sum.value();
}

double volume_shape_derivative(std::span<const SurfaceSample> samples, const VectorField& v) {
  CompensatedSum sum;
  for (const auto& s : samples)
    sum += value_of(v.evaluate(s.point()).w).dot(s.normal.vec()) * s.area_weight;
  return sum.value();
}

double scalar_integral(std::span<const SurfaceSample> samples, const ScalarField& g) {
  CompensatedSum sum;
  for (const auto& s : samples) sum += g.evaluate(s.point()).g.value() * s.area_weight;
  return sum.value();
}

double scalar_integral_shape_derivative(std::span<const SurfaceSample> samples,
                                        const ScalarField& g, const VectorField& v) {
  CompensatedSum sum;
  for (const auto& s : samples) {
    const FieldJet w = v.evaluate(s.point());
    const Mat3 a = tangential_jacobian(s, value_of(d_theta(w.w)), value_of(d_phi(w.w)));
    const double dg = g.gradient(s.position).dot(value_of(w.w));
    sum += (g.value(s.position) * a.trace() + dg) * s.area_weight;
  }
  return sum.value();
}

double tv_shape_derivative(std::span<const SurfaceSample> samples, const VectorField& v,
                           double eps_reg) {
  std::vector<double> g(samples.size()), dg(samples.size());
  std::vector<NodeVariation> vars(samples.size());
  parallel_for(samples.size(), [&](std::size_t k) {
    vars[k] = node_variation(samples[k], v);
    g[k] = tv_integrand(samples[k]);
    dg[k] = tv_integrand_variation(samples[k], vars[k], eps_reg);
  });
  return shape_derivative_surface_integral(samples, g, dg, vars);
}

CurvatureVariationTerms curvature_variation_terms(std::span<const SurfaceSample> samples,
                                                  const VectorField& v) {
  CompensatedSum t1, t2, t3, flux;
  for (const auto& s : samples) {
    const NodeVariation var = node_variation(s, v);
    const double inv_g = 1.0 / tv_integrand_frame(s);
    double a = 0.0, b = 0.0, c = 0.0;
    for (int i = 0; i < 2; ++i) {
      const Vec3 dnxi = s.dn_xi(i);
      a += dnxi.dot(var.normal_term[i]);
      b += dnxi.dot(var.metric_term[i]);
      c += dnxi.dot(var.frame_term[i]);
    }
    t1 += a * inv_g * s.area_weight;
    t2 += b * inv_g * s.area_weight;
    t3 += c * inv_g * s.area_weight;
    flux += var.v.dot(s.normal.vec()) * s.area_weight;
  }
  return {t1.value(), t2.value(), t3.value(), flux.value()};
}

IdentitySides normal_field_stokes(std::span<const SurfaceSample> samples, const VectorField& a,
                                  const VectorField& b, const VectorField& v) {
  CompensatedSum lhs, rhs;
  for (const auto& s : samples) {
    const ChartPoint pt = s.point();
    const JetVec3<1> aj = truncate<1>(a.evaluate(pt).w);
    const JetVec3<1> bj = truncate<1>(b.evaluate(pt).w);
    const JetVec3<1> n = truncate<1>(normal_jet(s.chart));
    const FieldJet w = v.evaluate(pt);
    const Mat3 grad_v = tangential_jacobian(s, value_of(d_theta(w.w)), value_of(d_phi(w.w)));

    const JetVec3<1> f = dot(aj, n) * bj;  // (a . n) b
    const double div_f = tangential_jacobian(s, value_of(d_theta(f)), value_of(d_phi(f))).trace();

    const Vec3 av = value_of(aj);
    const Vec3 bv = value_of(bj);
    const Vec3& nv = s.normal.vec();
    lhs += av.dot(grad_v * bv) * s.area_weight;
    const double bracket = -div_f + av.dot(nv) * bv.dot(nv) * (s.k1 + s.k2) + av.dot(s.dn * bv);
    rhs += value_of(w.w).dot(nv) * bracket * s.area_weight;
  }
  return {lhs.value(), rhs.value()};
}

IdentitySides tangential_stokes(std::span<const SurfaceSample> samples, const ScalarField& c,
                                const VectorField& v) {
  CompensatedSum lhs, rhs;
  for (const auto& s : samples) {
    const ChartPoint pt = s.point();
    const ScalarJet cj = c.evaluate(pt);
    const FieldJet w = v.evaluate(pt);
    const Mat3 grad_v = tangential_jacobian(s, value_of(d_theta(w.w)), value_of(d_phi(w.w)));
    const Vec3 vv = value_of(w.w);
    // D_Gamma c = [c_theta, c_phi] P as a row vector
    const Eigen::RowVector3d grad_c =
        Eigen::RowVector2d(cj.g.derivative(1, 0), cj.g.derivative(0, 1)) * s.dual;
    const double cv = cj.g.value();
    lhs += cv * grad_v.trace() * s.area_weight;
    rhs += (vv.dot(s.normal.vec()) * cv * (s.k1 + s.k2) - grad_c.dot(vv)) * s.area_weight;
  }
  return {lhs.value(), rhs.value()};
}

double tangential_stokes_residual(std::span<const SurfaceSample> samples, const VectorField& a,
                                  const VectorField& b, const VectorField& v) {
  return normal_field_stokes(samples, a, b, v).residual();
}

double field_l2_norm(std::span<const SurfaceSample> samples, const VectorField& v) {
  CompensatedSum sum;
  for (const auto& s : samples) sum += value_of(v.evaluate(s.point()).w).squaredNorm() * s.area_weight;
  return std::sqrt(sum.value());
}

double stationarity_residual(double r, const VectorField& v, const QuadratureGrid& grid,
                             std::optional<double> mu) {
  const double m = mu.value_or(-1.0 / (std::numbers::sqrt2 * r));
  const Samples samples = sample(SurfaceChart::sphere(r), grid);
  const double dl = tv_shape_derivative(samples, v) + m * area_shape_derivative(samples, v);
  return std::abs(dl) / (1.0 + field_l2_norm(samples, v));
}

double volume_stationarity_residual(double r, const VectorField& v, const QuadratureGrid& grid,
                                    std::optional<double> mu) {
  const double m = mu.value_or(-std::numbers::sqrt2 / (r * r));
  const Samples samples = sample(SurfaceChart::sphere(r), grid);
  const double dl = tv_shape_derivative(samples, v) + m * volume_shape_derivative(samples, v);
  return std::abs(dl) / (1.0 + field_l2_norm(samples, v));
}

Vec3 tv_integrand_gradient(const SurfaceSample& s) {
  const DualBasisJet p = dual_basis_jet(s.chart);
  const JetVec3<2> n = normal_jet(s.chart);
  const JetVec3<1> nt = d_theta(n);
  const JetVec3<1> np = d_phi(n);
  // g^2 = |D n|_F^2 with D n = n_theta p1^T + n_phi p2^T
  const Jet<1> g2 = dot(nt, nt) * dot(p.p1, p.p1) + 2.0 * dot(nt, np) * dot(p.p1, p.p2) +
                    dot(np, np) * dot(p.p2, p.p2);
  const Jet<1> g = sqrt(g2);
  return g.derivative(1, 0) * value_of(p.p1) + g.derivative(0, 1) * value_of(p.p2);
}

double tv_integrand_normal_extension(const SurfaceChart& perturbed, const Vec3& y, double theta0,
                                     double phi0) {
  // Newton on f(t, p) = |x(t, p) - y|^2 / 2 for the closest point.
  double t = theta0, p = phi0;
  for (int iter = 0; iter < 50; ++iter) {
    const ChartJet c = perturbed.evaluate(t, p);
    const Vec3 r = value_of(c.x) - y;
    Eigen::Vector2d grad;
    Eigen::Matrix2d hess;
    Vec3 d[2], dd[2][2];
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 3; ++k) d[i][k] = c.x[k].derivative(i == 0, i == 1);
    for (int k = 0; k < 3; ++k) {
      dd[0][0][k] = c.x[k].derivative(2, 0);
      dd[0][1][k] = c.x[k].derivative(1, 1);
      dd[1][1][k] = c.x[k].derivative(0, 2);
    }
    dd[1][0] = dd[0][1];
    for (int i = 0; i < 2; ++i) {
      grad[i] = d[i].dot(r);
      for (int j = 0; j < 2; ++j) hess(i, j) = d[i].dot(d[j]) + dd[i][j].dot(r);
    }
    const Eigen::Vector2d step = hess.ldlt().solve(grad);
    t -= step[0];
    p -= step[1];
    if (step.norm() < 1e-15) break;
  }
  return tv_integrand(sample_point(perturbed, t, p));
}

double fd_local_tv_derivative(const SurfaceChart& chart, const VectorField& v, double theta,
                              double phi, double eps) {
  const Vec3 y = chart.position(theta, phi);
  const double plus = tv_integrand_normal_extension(chart.perturbed(v, eps), y, theta, phi);
  const double minus = tv_integrand_normal_extension(chart.perturbed(v, -eps), y, theta, phi);
  return (plus - minus) / (2.0 * eps);
}

double fd_shape_derivative(const SurfaceChart& chart, const QuadratureGrid& grid,
                           const ChartFunctional& functional, const VectorField& v, double eps) {
  const double plus = functional(sample(perturb_chart(chart, v, eps, grid), grid));
  const double minus = functional(sample(perturb_chart(chart, v, -eps, grid), grid));
  return (plus - minus) / (2.0 * eps);
}

std::array<Vec3, 2> pushforward_frame(const SurfaceSample& base, const std::array<Vec3, 2>& frame,
                                      const SurfaceSample& perturbed) {
  const Vec3 u1 = perturbed.tangents * (base.dual * frame[0]);
  const Vec3 u2 = perturbed.tangents * (base.dual * frame[1]);
  const Vec3 e1 = u1.normalized();
  return {e1, gram_schmidt_second(e1, u2)};
}

NodeDifference fd_node_variation(const SurfaceChart& chart, const SurfaceSample& base,
                                 const VectorField& v, double eps) {
  const std::array<Vec3, 2> frame{base.frame[0].vec(), base.frame[1].vec()};
  auto perturbed = [&](double e) {
    SurfaceSample s = sample_point(chart.perturbed(v, e), base.theta, base.phi, base.grid_weight);
    const auto f = pushforward_frame(base, frame, s);
    s.frame = {TangentVector(s.normal, f[0]), TangentVector(s.normal, f[1])};
    return s;
  };
  const SurfaceSample p = perturbed(eps);
  const SurfaceSample m = perturbed(-eps);
  const double h = 2.0 * eps;
  NodeDifference out;
  out.dn = (p.normal.vec() - m.normal.vec()) / h;
  for (int i = 0; i < 2; ++i) {
    out.dxi[i] = (p.frame[i].vec() - m.frame[i].vec()) / h;
    out.d_dn_xi[i] = (p.dn_xi(i) - m.dn_xi(i)) / h;
  }
  out.dg = (tv_integrand_frame(p) - tv_integrand_frame(m)) / h;
  const double jac = base.tangents.col(0).cross(base.tangents.col(1)).norm();
  const double jp = p.tangents.col(0).cross(p.tangents.col(1)).norm();
  const double jm = m.tangents.col(0).cross(m.tangents.col(1)).norm();
  out.d_area_density = (jp - jm) / (h * jac);
  return out;
}

}  // namespace tvn
