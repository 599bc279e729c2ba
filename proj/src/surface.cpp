#include "tvn/surface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "tvn/errors.hpp"
#include "tvn/numeric.hpp"

namespace tvn {

namespace {

constexpr double kDegenerateCross = 1e-12;

void check_radius_positive(const HarmonicExpansion& rho, const QuadratureGrid& grid) {
  for (const auto& node : grid.nodes()) {
    const double v = rho.value(node.theta, node.phi);
    if (!(v > 0.0)) {
      std::ostringstream msg;
      msg << "radial chart: rho = " << v << " <= 0 at (theta, phi) = (" << node.theta << ", "
          << node.phi << ")";
      throw InvalidChart(msg.str());
    }
  }
}

}  // namespace

int ChartSpec::harmonic_degree() const {
  int l = 0;
  for (const auto& t : terms) l = std::max(l, t.l);
  return l;
}

SurfaceChart SurfaceChart::sphere(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidChart("sphere radius must be positive");
  SurfaceChart c;
  c.kind_ = Kind::sphere;
  c.radius_ = r;
  return c;
}

SurfaceChart SurfaceChart::ellipsoid(double a, double b, double c) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0) || !std::isfinite(a + b + c))
    throw InvalidChart("ellipsoid semi-axes must be positive");
  SurfaceChart s;
  s.kind_ = Kind::ellipsoid;
  s.axes_ = Vec3(a, b, c);
  return s;
}

SurfaceChart SurfaceChart::radial(HarmonicExpansion rho) {
  return radial(std::move(rho), QuadratureGrid(32, 64));
}

SurfaceChart SurfaceChart::radial(HarmonicExpansion rho, const QuadratureGrid& check_grid) {
  for (double c : rho.coefficients())
    if (!std::isfinite(c)) throw InvalidChart("radial chart: non-finite coefficient");
  check_radius_positive(rho, check_grid);
  SurfaceChart s;
  s.kind_ = Kind::radial;
  s.rho_ = std::move(rho);
  return s;
}

SurfaceChart SurfaceChart::scaled(double alpha) const {
  if (!(alpha > 0.0)) throw InvalidChart("scale factor must be positive");
  SurfaceChart s = *this;
  s.ops_.emplace_back(Scale{alpha});
  return s;
}

SurfaceChart SurfaceChart::rotated(const Mat3& r) const {
  SurfaceChart s = *this;
  s.ops_.emplace_back(Rotate{r});
  return s;
}

SurfaceChart SurfaceChart::perturbed(const VectorField& v, double eps) const {
  SurfaceChart s = *this;
  s.ops_.emplace_back(Perturb{v, eps});
  return s;
}

ChartJet SurfaceChart::evaluate(double theta, double phi) const {
  ChartJet out;
  switch (kind_) {
    case Kind::sphere:
      out.x = radius_ * radial_direction<3>(theta, phi);
      break;
    case Kind::ellipsoid: {
      const JetVec3<3> w = radial_direction<3>(theta, phi);
      out.x = {w[0] * axes_[0], w[1] * axes_[1], w[2] * axes_[2]};
      break;
    }
    case Kind::radial:
      out.x = rho_.evaluate<3>(theta, phi) * radial_direction<3>(theta, phi);
      break;
  }
  for (const Op& op : ops_) {
    if (const auto* s = std::get_if<Scale>(&op)) {
      out.x = s->alpha * out.x;
    } else if (const auto* r = std::get_if<Rotate>(&op)) {
      out.x = tvn::apply(r->r, out.x);
    } else {
      const auto& p = std::get<Perturb>(op);
      const FieldJet w = p.v.evaluate({theta, phi, out});
      out.x = out.x + p.eps * w.w;
      out.valid_order = std::min(out.valid_order, w.valid_order);
    }
  }
  return out;
}

Vec3 SurfaceChart::position(double theta, double phi) const {
  return value_of(evaluate(theta, phi).x);
}

SurfaceChart build_chart(const ChartSpec& spec, const QuadratureGrid& grid) {
  switch (spec.kind) {
    case ChartSpec::Kind::sphere:
      return SurfaceChart::sphere(spec.radius);
    case ChartSpec::Kind::ellipsoid:
      return SurfaceChart::ellipsoid(spec.axes[0], spec.axes[1], spec.axes[2]);
    case ChartSpec::Kind::radial: {
      HarmonicExpansion rho(spec.harmonic_degree());
      rho(0, 0) += spec.radius * std::sqrt(4.0 * std::numbers::pi);
      for (const auto& t : spec.terms) {
        if (t.l < 0 || std::abs(t.m) > t.l)
          throw InvalidChart("radial chart: invalid harmonic index (" + std::to_string(t.l) +
                             ", " + std::to_string(t.m) + ")");
        rho(t.l, t.m) += t.c;
      }
      return SurfaceChart::radial(std::move(rho), grid);
    }
  }
  throw InvalidChart("unknown chart kind");
}

SurfaceChart perturb_chart(const SurfaceChart& chart, const VectorField& v, double eps,
                           const QuadratureGrid& grid) {
  SurfaceChart out = chart.perturbed(v, eps);
  for (const auto& node : grid.nodes()) {
    const ChartJet before = chart.evaluate(node.theta, node.phi);
    const ChartJet after = out.evaluate(node.theta, node.phi);
    const Vec3 c0 = value_of(d_theta(before.x)).cross(value_of(d_phi(before.x)));
    const Vec3 c1 = value_of(d_theta(after.x)).cross(value_of(d_phi(after.x)));
    const Vec3 x1 = value_of(after.x);
    const double s0 = c0.dot(value_of(before.x));
    const double s1 = c1.dot(x1);
    if (!std::isfinite(s1) || s0 * s1 <= 0.0 || c0.dot(c1) <= 0.0) {
      std::ostringstream msg;
      msg << "perturbation with eps = " << eps << " folds the surface or loses star shape near"
          << " (theta, phi) = (" << node.theta << ", " << node.phi << ")";
      throw LostStarShape(msg.str());
    }
  }
  return out;
}

SurfaceSample sample_from_jet(const ChartJet& chart, double theta, double phi,
                              double grid_weight) {
  SurfaceSample s;
  s.theta = theta;
  s.phi = phi;
  s.grid_weight = grid_weight;
  s.chart = chart;
  s.position = value_of(chart.x);

  const Vec3 xt = value_of(d_theta(chart.x));
  const Vec3 xp = value_of(d_phi(chart.x));
  const Vec3 c = xt.cross(xp);
  const double jac = c.norm();
  if (!(jac >= kDegenerateCross)) {
    std::ostringstream msg;
    msg << "|x_theta x x_phi| = " << jac << " at (theta, phi) = (" << theta << ", " << phi << ")";
    throw DegenerateMetric(msg.str());
  }

  const JetVec3<2> n = normal_jet(chart);
  s.normal = UnitNormal(value_of(n));
  Mat32 dn_par;
  dn_par.col(0) = value_of(d_theta(n));
  dn_par.col(1) = value_of(d_phi(n));

  s.tangents.col(0) = xt;
  s.tangents.col(1) = xp;
  const Eigen::Matrix2d g = s.tangents.transpose() * s.tangents;
  s.dual = g.inverse() * s.tangents.transpose();
  s.dn = dn_par * s.dual;

  const Vec3 e1 = xt.normalized();
  const Vec3 e2 = (xp - xp.dot(e1) * e1).normalized();
  s.frame = {TangentVector(s.normal, e1), TangentVector(s.normal, e2)};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) s.shape_op(a, b) = s.frame[a].vec().dot(s.dn * s.frame[b].vec());

  const double mean = 0.5 * (s.shape_op(0, 0) + s.shape_op(1, 1));
  const double off = 0.5 * (s.shape_op(0, 1) + s.shape_op(1, 0));
  const double half_gap = std::hypot(0.5 * (s.shape_op(0, 0) - s.shape_op(1, 1)), off);
  s.k1 = mean + half_gap;
  s.k2 = mean - half_gap;
  s.area_weight = jac * grid_weight;
  return s;
}

SurfaceSample sample_point(const SurfaceChart& chart, double theta, double phi,
                           double grid_weight) {
  return sample_from_jet(chart.evaluate(theta, phi), theta, phi, grid_weight);
}

Samples sample(const SurfaceChart& chart, const QuadratureGrid& grid) {
  Samples out(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    const auto& node = grid.node(k);
    out[k] = sample_point(chart, node.theta, node.phi, node.weight);
  });
  return out;
}

Samples with_frames(Samples samples, std::span<const std::array<Vec3, 2>> frames) {
  for (std::size_t k = 0; k < samples.size(); ++k) {
    SurfaceSample& s = samples[k];
    s.frame = {TangentVector(s.normal, frames[k][0]), TangentVector(s.normal, frames[k][1])};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        s.shape_op(a, b) = s.frame[a].vec().dot(s.dn * s.frame[b].vec());
  }
  return samples;
}

double area(std::span<const SurfaceSample> samples) {
  CompensatedSum sum;
  for (const auto& s : samples) sum += s.area_weight;
  return sum.value();
}

double volume(std::span<const SurfaceSample> samples) {
  CompensatedSum sum;
  for (const auto& s : samples) sum += s.position.dot(s.normal.vec()) * s.area_weight;
  return sum.value() / 3.0;
}

double area(const SurfaceChart& chart, const QuadratureGrid& grid) {
  return area(sample(chart, grid));
}

double volume(const SurfaceChart& chart, const QuadratureGrid& grid) {
  return volume(sample(chart, grid));
}

TriangleMesh triangulate(const SurfaceChart& chart, const QuadratureGrid& grid) {
  const int nt = grid.n_theta();
  const int np = grid.n_phi();
  TriangleMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nt) * np + 2);

  // Pole positions come straight from the chart when it is defined there;
  // normal-based perturbations are not, so fall back to the ring centroid.
  auto pole = [&](double theta, int ring) {
    Vec3 p = chart.position(theta, 0.0);
    if (!p.allFinite()) {
      p.setZero();
      for (int j = 0; j < np; ++j) {
        const auto& node = grid.node(ring, j);
        p += chart.position(node.theta, node.phi);
      }
      p /= np;
    }
    return p;
  };

  mesh.vertices.push_back(pole(0.0, 0));
  for (const auto& node : grid.nodes()) mesh.vertices.push_back(chart.position(node.theta, node.phi));
  mesh.vertices.push_back(pole(std::numbers::pi, nt - 1));

  const int north = 0;
  const int south = nt * np + 1;
  auto vid = [np](int i, int j) { return 1 + i * np + (j % np); };
  for (int j = 0; j < np; ++j) mesh.faces.push_back({north, vid(0, j), vid(0, j + 1)});
  for (int i = 0; i + 1 < nt; ++i)
    for (int j = 0; j < np; ++j) {
      mesh.faces.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.faces.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  for (int j = 0; j < np; ++j) mesh.faces.push_back({vid(nt - 1, j), south, vid(nt - 1, j + 1)});
  return mesh;
}

double mesh_area(const TriangleMesh& mesh) {
  CompensatedSum sum;
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    sum += 0.5 * (mesh.vertices[f[1]] - a).cross(mesh.vertices[f[2]] - a).norm();
  }
  return sum.value();
}

void write_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.precision(17);
  for (const Vec3& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces)
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void export_mesh(const SurfaceChart& chart, const QuadratureGrid& grid,
                 const std::filesystem::path& path) {
  write_mesh(triangulate(chart, grid), path);
}

TriangleMesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  TriangleMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      ls >> v.x() >> v.y() >> v.z();
      if (!ls) throw IoError("malformed vertex line in " + path.string());
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::array<int, 3> f{};
      for (int& i : f) {
        std::string tok;
        ls >> tok;
        if (tok.empty()) throw IoError("malformed face line in " + path.string());
        i = std::stoi(tok.substr(0, tok.find('/'))) - 1;
      }
      mesh.faces.push_back(f);
    }
  }
  return mesh;
}

}  // namespace tvn
