#pragma once

// Split Bregman / ADMM for
//   minimize l(Gamma) + beta |n|_TV  s.t.  d_i = (D_Gamma n) xi_i,
// with the scaled augmented Lagrangian
//   L = l + beta int |d| + (lambda/2) sum_i int |d_i - (D_Gamma n) xi_i - b_i|^2.
// The shape variable is the radius expansion of a radial chart. The split
// variables d_i, b_i live in the tangent planes of the current normals and
// are moved between normal fields by parallel transport on S^2.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tvn/shape_calculus.hpp"
#include "tvn/surface.hpp"

namespace tvn {

struct GradientMetric {
  enum class Kind { l2, sobolev };
  Kind kind = Kind::sobolev;
  double s = 1.0;

  /// Factor applied to the gradient coefficient of degree l.
  double weight(int l) const;
  bool operator==(const GradientMetric&) const = default;
};

struct AdmmConfig {
  double beta = 0.1;
  double lambda = 1.0;
  int shape_steps_per_sweep = 3;
  /// Initial trial step of the backtracking search, or the fixed step.
  double step_size = 1.0;
  bool line_search = true;
  int max_sweeps = 100;
  double tol_residual = 1e-3;
  double tol_objective = 1e-6;
  GradientMetric gradient_metric;
  double eps_reg = kDefaultEpsReg;
  /// Harmonic degree of the radius expansion being optimized.
  int degree = 6;

  /// Throws ConfigError.
  void validate() const;
  bool operator==(const AdmmConfig&) const = default;
};

/// Data of the shape derivative of a loss that is linear in the node
/// variation: at node k the density is
///   area_weight * ((div_coeff + div_density[k]) div V + flux_coeff V.n + dn_coeff[k] . dn[V]).
struct LossLinearization {
  double div_coeff = 0.0;
  double flux_coeff = 0.0;
  std::vector<double> div_density;  // empty means zero
  std::vector<Vec3> dn_coeff;       // empty means zero

  double node_density(std::size_t k, const SurfaceSample& s, const NodeVariation& var) const;
};

class LossTerm {
 public:
  enum class Kind { none, area_penalty, volume_penalty, normal_tracking, area_multiplier };

  static LossTerm none();
  /// (weight / 2) (A - target)^2.
  static LossTerm area_penalty(double target, double weight);
  /// (weight / 2) (Vol - target)^2.
  static LossTerm volume_penalty(double target, double weight);
  /// (weight / 2) int |n - N|^2 with N the normal of `target` at the same
  /// chart parameters.
  static LossTerm normal_tracking(SurfaceChart target, double weight);
  /// mu (A - target).
  static LossTerm area_multiplier(double mu, double target);

  Kind kind() const { return kind_; }
  double target() const { return target_; }
  double weight() const { return weight_; }
  const std::optional<SurfaceChart>& target_chart() const { return target_chart_; }

  double value(std::span<const SurfaceSample> samples) const;
  LossLinearization linearize(std::span<const SurfaceSample> samples) const;
  double shape_derivative(std::span<const SurfaceSample> samples, const VectorField& v) const;
  double shape_derivative(std::span<const SurfaceSample> samples,
                          std::span<const NodeVariation> vars) const;

 private:
  LossTerm() = default;
  Kind kind_ = Kind::none;
  double target_ = 0.0;
  double weight_ = 0.0;
  std::optional<SurfaceChart> target_chart_;
};

/// Split variables at every node (scaled multipliers b = lambda_i / lambda).
struct SplitState {
  std::vector<TangentVector> d1, d2;
  std::vector<TangentVector> b1, b2;
  int iteration = 0;

  /// d = b = 0 at the sample normals.
  static SplitState zero(std::span<const SurfaceSample> samples);
  /// d_i = (D n) xi_i, b = 0.
  static SplitState matching(std::span<const SurfaceSample> samples);

  std::size_t size() const { return d1.size(); }
  const TangentVector& d(int i, std::size_t k) const { return i == 0 ? d1[k] : d2[k]; }
  const TangentVector& b(int i, std::size_t k) const { return i == 0 ? b1[k] : b2[k]; }
};

/// Largest |v . n| over the state vectors.
double max_normal_component(const SplitState& state, std::span<const SurfaceSample> samples);

/// The samples must carry the frames the state refers to.
double augmented_lagrangian(std::span<const SurfaceSample> samples, const SplitState& state,
                            const LossTerm& loss, const AdmmConfig& cfg);

/// Shape derivative of the augmented Lagrangian with d and b moved passively
/// (their material derivatives vanish) and the frame pushed forward.
double lagrangian_shape_derivative(std::span<const SurfaceSample> samples, const SplitState& state,
                                   const LossTerm& loss, const VectorField& v,
                                   const AdmmConfig& cfg);

/// The same derivative evaluated by finite differences: the chart is
/// perturbed, the frame pushed forward, and d, b kept as fixed vectors.
double fd_lagrangian_shape_derivative(const SurfaceChart& chart, const QuadratureGrid& grid,
                                      std::span<const SurfaceSample> samples,
                                      const SplitState& state, const LossTerm& loss,
                                      const VectorField& v, const AdmmConfig& cfg, double eps);

/// Jets of Y_j omega at every grid node for all harmonics up to `degree`:
/// the derivatives of the embedding of a radial chart with respect to its
/// radius coefficients.
class RadialBasis {
 public:
  RadialBasis(const QuadratureGrid& grid, int degree);

  int degree() const { return degree_; }
  std::size_t size() const { return harmonic_count(degree_); }
  const QuadratureGrid& grid() const { return grid_; }
  /// Coefficients of Y_j omega_a at node k.
  const Jet<2>& harmonic(std::size_t k, std::size_t j) const { return harmonics_[k * size() + j]; }
  const JetVec3<2>& direction(std::size_t k) const { return directions_[k]; }

 private:
  QuadratureGrid grid_;
  int degree_;
  std::vector<Jet<2>> harmonics_;
  std::vector<JetVec3<2>> directions_;
};

/// dL/dc_j for the radius coefficients c_j, j < basis.size().
std::vector<double> lagrangian_gradient(std::span<const SurfaceSample> samples,
                                        const SplitState& state, const LossTerm& loss,
                                        const AdmmConfig& cfg, const RadialBasis& basis);

/// Radial chart of the given degree describing the same surface. Throws
/// InvalidChart for charts that are not radial graphs (ellipsoids, or
/// charts that have been rotated/perturbed).
SurfaceChart to_radial_chart(const SurfaceChart& chart, int degree);

struct ShapeStep {
  SurfaceChart chart;
  Samples samples;  // on the new chart, frames pushed forward
  double lagrangian = 0.0;
  double step = 0.0;  // accepted step length (0 when the gradient vanishes)
};

/// One descent step in the radius coefficients with the metric-smoothed
/// gradient, d and b held fixed. `samples` are the samples of `chart` on
/// basis.grid() carrying the current frames. Throws LineSearchFailed.
ShapeStep shape_gradient_step(const SurfaceChart& chart, std::span<const SurfaceSample> samples,
                              const SplitState& state, const LossTerm& loss,
                              const AdmmConfig& cfg, const RadialBasis& basis);

struct TransportResult {
  SplitState state;
  std::vector<std::array<TangentVector, 2>> frames;
};

/// Moves d, b and the frame from the old to the new normal at each node.
/// Throws AntipodalPoints.
TransportResult transport_state(const SplitState& state, std::span<const UnitNormal> old_normals,
                                std::span<const UnitNormal> new_normals,
                                std::span<const std::array<TangentVector, 2>> old_frames);

/// d = max(|q| - beta/lambda, 0) q/|q| with q_i = (D n) xi_i + b_i.
SplitState shrinkage(std::span<const SurfaceSample> samples, const SplitState& state,
                     const AdmmConfig& cfg);

/// b_i <- b_i + (D n) xi_i - d_i.
SplitState multiplier_update(std::span<const SurfaceSample> samples, const SplitState& state);

/// L2 norm of (d_1 - (D n) xi_1, d_2 - (D n) xi_2).
double constraint_residual(std::span<const SurfaceSample> samples, const SplitState& state);

struct TraceRow {
  int sweep = 0;
  double lagrangian = 0.0;
  double tv = 0.0;
  double loss = 0.0;
  double residual = 0.0;
  double area = 0.0;
  double volume = 0.0;
};

struct RunResult {
  SurfaceChart chart;
  std::vector<TraceRow> trace;
  SplitState state;
  bool converged = false;
};

/// Called after every sweep.
using SweepObserver = std::function<void(const TraceRow&, const SurfaceChart&)>;

/// Runs sweeps of: shape steps, transport, shrinkage, multiplier update.
/// Stops after cfg.max_sweeps or when the constraint residual is below
/// tol_residual and the relative change of the Lagrangian below
/// tol_objective. Throws NonFinite, LineSearchFailed, AntipodalPoints.
RunResult run(const SurfaceChart& initial, const QuadratureGrid& grid, const LossTerm& loss,
              const AdmmConfig& cfg, const SweepObserver& observer = {});

}  // namespace tvn
