#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tvn/fields.hpp"
#include "tvn/quadrature.hpp"
#include "tvn/sphere_manifold.hpp"
#include "tvn/spherical_harmonics.hpp"

namespace tvn {

using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat23 = Eigen::Matrix<double, 2, 3>;

/// Serializable description of a chart.
struct ChartSpec {
  enum class Kind { sphere, ellipsoid, radial };
  struct Term {
    int l = 0;
    int m = 0;
    double c = 0.0;
    bool operator==(const Term&) const = default;
  };

  Kind kind = Kind::sphere;
  double radius = 1.0;            // sphere radius, or constant offset of a radial chart
  Vec3 axes = Vec3::Ones();       // ellipsoid semi-axes (a, b, c)
  std::vector<Term> terms;        // radial: rho = radius + sum c Y_lm

  bool operator==(const ChartSpec&) const = default;

  /// Largest harmonic degree present (0 for sphere/ellipsoid).
  int harmonic_degree() const;
};

/// Closed genus-0 surface given by a global (theta, phi) parametrization with
/// analytic derivatives: a sphere, an ellipsoid, or a star-shaped radial graph
/// rho(theta, phi) * omega(theta, phi), optionally followed by scalings,
/// rotations and perturbations of identity x -> x + eps V(x).
class SurfaceChart {
 public:
  enum class Kind { sphere, ellipsoid, radial };

  static SurfaceChart sphere(double r);
  static SurfaceChart ellipsoid(double a, double b, double c);
  /// rho must be positive; checked on `check_grid` plus a default 32x64 grid.
  static SurfaceChart radial(HarmonicExpansion rho);
  static SurfaceChart radial(HarmonicExpansion rho, const QuadratureGrid& check_grid);

  /// alpha * chart.
  SurfaceChart scaled(double alpha) const;
  /// R * chart.
  SurfaceChart rotated(const Mat3& r) const;
  /// Unchecked perturbation of identity; see perturb_chart for the checked form.
  SurfaceChart perturbed(const VectorField& v, double eps) const;

  Kind kind() const { return kind_; }
  double radius() const { return radius_; }
  const Vec3& axes() const { return axes_; }
  const HarmonicExpansion& radius_function() const { return rho_; }
  /// True when no scaling/rotation/perturbation has been applied.
  bool is_plain() const { return ops_.empty(); }

  ChartJet evaluate(double theta, double phi) const;
  Vec3 position(double theta, double phi) const;

 private:
  struct Scale {
    double alpha;
  };
  struct Rotate {
    Mat3 r;
  };
  struct Perturb {
    VectorField v;
    double eps;
  };
  using Op = std::variant<Scale, Rotate, Perturb>;

  SurfaceChart() = default;

  Kind kind_ = Kind::sphere;
  double radius_ = 1.0;
  Vec3 axes_ = Vec3::Ones();
  HarmonicExpansion rho_;
  std::vector<Op> ops_;
};

/// Builds a chart from its description; radial positivity is checked on `grid`.
/// Throws InvalidChart.
SurfaceChart build_chart(const ChartSpec& spec, const QuadratureGrid& grid);

/// Checked perturbation of identity. Throws LostStarShape if at a node of
/// `grid` the perturbed surface folds over (orientation flips) or leaves the
/// star-shaped class (x . omega <= 0).
SurfaceChart perturb_chart(const SurfaceChart& chart, const VectorField& v, double eps,
                           const QuadratureGrid& grid);

/// Geometry at one quadrature node.
struct SurfaceSample {
  Vec3 position = Vec3::Zero();
  UnitNormal normal;
  /// Orthonormal tangent frame: Gram-Schmidt of (x_theta, x_phi).
  std::array<TangentVector, 2> frame;
  /// Matrix of the shape operator (derivative of the Gauss map) in `frame`.
  Eigen::Matrix2d shape_op = Eigen::Matrix2d::Zero();
  double k1 = 0.0;  // k1 >= k2
  double k2 = 0.0;
  double area_weight = 0.0;

  // Parametric data used by the derivative code.
  double theta = 0.0;
  double phi = 0.0;
  double grid_weight = 0.0;
  ChartJet chart;
  Mat32 tangents = Mat32::Zero();  // [x_theta, x_phi]
  Mat23 dual = Mat23::Zero();      // (X^T X)^{-1} X^T
  Mat3 dn = Mat3::Zero();          // D_Gamma n as a map of R^3 (annihilates n)

  ChartPoint point() const { return {theta, phi, chart}; }
  Vec3 dn_xi(int i) const { return dn * frame[i].vec(); }
};

using Samples = std::vector<SurfaceSample>;

/// Samples the chart on every grid node. Throws DegenerateMetric when
/// |x_theta x x_phi| < 1e-12 at a node.
Samples sample(const SurfaceChart& chart, const QuadratureGrid& grid);

/// Geometry at an arbitrary parameter point.
SurfaceSample sample_point(const SurfaceChart& chart, double theta, double phi,
                           double grid_weight = 0.0);

/// Geometry from an embedding jet (valid_order >= 2 required).
SurfaceSample sample_from_jet(const ChartJet& chart, double theta, double phi, double grid_weight);

/// Replaces the frame of each sample (frames must be orthonormal and tangent)
/// and recomputes shape_op in the new frame.
Samples with_frames(Samples samples, std::span<const std::array<Vec3, 2>> frames);

double area(std::span<const SurfaceSample> samples);
/// (1/3) integral of x . n.
double volume(std::span<const SurfaceSample> samples);
double area(const SurfaceChart& chart, const QuadratureGrid& grid);
double volume(const SurfaceChart& chart, const QuadratureGrid& grid);

/// Vertex/face triangle mesh (faces are 0-based in memory, 1-based on disk).
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
};

/// Grid vertices plus both poles, pole caps closed with triangle fans.
TriangleMesh triangulate(const SurfaceChart& chart, const QuadratureGrid& grid);
double mesh_area(const TriangleMesh& mesh);

/// Writes Wavefront OBJ ("v x y z" / "f i j k", 1-based). Throws IoError.
void export_mesh(const SurfaceChart& chart, const QuadratureGrid& grid,
                 const std::filesystem::path& path);
void write_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);
TriangleMesh read_mesh(const std::filesystem::path& path);

}  // namespace tvn
