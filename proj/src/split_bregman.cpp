#include "tvn/split_bregman.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "tvn/errors.hpp"
#include "tvn/functionals.hpp"
#include "tvn/numeric.hpp"

namespace tvn {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 30;
constexpr int kMaxTransportRetries = 10;

struct NodeTerms {
  double d_norm = 0.0;
  std::array<Vec3, 2> r{Vec3::Zero(), Vec3::Zero()};  // d_i - (D n) xi_i - b_i
};

NodeTerms node_terms(const SurfaceSample& s, const SplitState& state, std::size_t k) {
  NodeTerms t;
  t.d_norm = std::sqrt(state.d1[k].vec().squaredNorm() + state.d2[k].vec().squaredNorm());
  for (int i = 0; i < 2; ++i) t.r[i] = state.d(i, k).vec() - s.dn_xi(i) - state.b(i, k).vec();
  return t;
}

// Density of the Lagrangian derivative at node k; linear in `var`.
double lagrangian_density(const SurfaceSample& s, std::size_t k, const SplitState& state,
                          const LossLinearization& loss, const AdmmConfig& cfg,
                          const NodeVariation& var) {
  const NodeTerms t = node_terms(s, state, k);
  const double value = cfg.beta * t.d_norm + 0.5 * cfg.lambda * (t.r[0].squaredNorm() + t.r[1].squaredNorm());
  double coupling = 0.0;
  for (int i = 0; i < 2; ++i) coupling += t.r[i].dot(var.d_dn_xi(i));
  return loss.node_density(k, s, var) + s.area_weight * (value * var.div_v - cfg.lambda * coupling);
}

void check_sizes(std::span<const SurfaceSample> samples, const SplitState& state) {
  if (state.size() != samples.size() || state.d2.size() != samples.size() ||
      state.b1.size() != samples.size() || state.b2.size() != samples.size())
    throw std::invalid_argument("split state and samples have different node counts");
}

Samples pushed_forward(std::span<const SurfaceSample> base, Samples target) {
  std::vector<std::array<Vec3, 2>> frames(base.size());
  for (std::size_t k = 0; k < base.size(); ++k)
    frames[k] = pushforward_frame(base[k], {base[k].frame[0].vec(), base[k].frame[1].vec()}, target[k]);
  return with_frames(std::move(target), frames);
}

}  // namespace

double GradientMetric::weight(int l) const {
  if (kind == Kind::l2) return 1.0;
  return std::pow(1.0 + l * (l + 1.0), -s);
}

void AdmmConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("admm: " + what); };
  if (!(beta >= 0.0) || !std::isfinite(beta)) fail("beta must be >= 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail("lambda must be > 0");
  if (shape_steps_per_sweep < 1) fail("shape_steps_per_sweep must be >= 1");
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) fail("step_size must be >= 0");
  if (max_sweeps < 0) fail("max_sweeps must be >= 0");
  if (!(tol_residual > 0.0)) fail("tol_residual must be > 0");
  if (!(tol_objective > 0.0)) fail("tol_objective must be > 0");
  if (!(eps_reg >= 0.0)) fail("eps_reg must be >= 0");
  if (gradient_metric.kind == GradientMetric::Kind::sobolev && !(gradient_metric.s >= 0.0))
    fail("sobolev exponent must be >= 0");
  if (degree < 0) fail("degree must be >= 0");
}

double LossLinearization::node_density(std::size_t k, const SurfaceSample& s,
                                       const NodeVariation& var) const {
  double div = div_coeff;
  if (!div_density.empty()) div += div_density[k];
  double acc = div * var.div_v + flux_coeff * var.v.dot(s.normal.vec());
  if (!dn_coeff.empty()) acc += dn_coeff[k].dot(var.dn);
  return s.area_weight * acc;
}

LossTerm LossTerm::none() { return {}; }

LossTerm LossTerm::area_penalty(double target, double weight) {
  LossTerm t;
  t.kind_ = Kind::area_penalty;
  t.target_ = target;
  t.weight_ = weight;
  return t;
}

LossTerm LossTerm::volume_penalty(double target, double weight) {
  LossTerm t = area_penalty(target, weight);
  t.kind_ = Kind::volume_penalty;
  return t;
}

LossTerm LossTerm::normal_tracking(SurfaceChart target, double weight) {
  LossTerm t;
  t.kind_ = Kind::normal_tracking;
  t.weight_ = weight;
  t.target_chart_ = std::move(target);
  return t;
}

LossTerm LossTerm::area_multiplier(double mu, double target) {
  LossTerm t = area_penalty(target, mu);
  t.kind_ = Kind::area_multiplier;
  return t;
}

namespace {

std::vector<Vec3> tracking_mismatch(const SurfaceChart& target, std::span<const SurfaceSample> samples) {
  std::vector<Vec3> out(samples.size());
  parallel_for(samples.size(), [&](std::size_t k) {
    const auto& s = samples[k];
    out[k] = s.normal.vec() - sample_point(target, s.theta, s.phi).normal.vec();
  });
  return out;
}

}  // namespace

double LossTerm::value(std::span<const SurfaceSample> samples) const {
  switch (kind_) {
    case Kind::none:
      return 0.0;
    case Kind::area_penalty: {
      const double e = area(samples) - target_;
      return 0.5 * weight_ * e * e;
    }
    case Kind::volume_penalty: {
      const double e = volume(samples) - target_;
      return 0.5 * weight_ * e * e;
    }
    case Kind::area_multiplier:
      return weight_ * (area(samples) - target_);
    case Kind::normal_tracking: {
      const auto diff = tracking_mismatch(*target_chart_, samples);
      CompensatedSum sum;
      for (std::size_t k = 0; k < samples.size(); ++k) sum += diff[k].squaredNorm() * samples[k].area_weight;
      return 0.5 * weight_ * sum.value();
    }
  }
  return 0.0;
}

LossLinearization LossTerm::linearize(std::span<const SurfaceSample> samples) const {
  LossLinearization lin;
  switch (kind_) {
    case Kind::none:
      break;
    case Kind::area_penalty:
      lin.div_coeff = weight_ * (area(samples) - target_);
      break;
    case Kind::volume_penalty:
      lin.flux_coeff = weight_ * (volume(samples) - target_);
      break;
    case Kind::area_multiplier:
      lin.div_coeff = weight_;
      break;
    case Kind::normal_tracking: {
      const auto diff = tracking_mismatch(*target_chart_, samples);
      lin.div_density.resize(samples.size());
      lin.dn_coeff.resize(samples.size());
      for (std::size_t k = 0; k < samples.size(); ++k) {
        lin.div_density[k] = 0.5 * weight_ * diff[k].squaredNorm();
        lin.dn_coeff[k] = weight_ * diff[k];
      }
      break;
    }
  }
  return lin;
}

double LossTerm::shape_derivative(std::span<const SurfaceSample> samples,
                                  std::span<const NodeVariation> vars) const {
  const LossLinearization lin = linearize(samples);
  CompensatedSum sum;
  for (std::size_t k = 0; k < samples.size(); ++k) sum += lin.node_density(k, samples[k], vars[k]);
  return sum.value();
}

double LossTerm::shape_derivative(std::span<const SurfaceSample> samples, const VectorField& v) const {
  return shape_derivative(samples, node_variations(samples, v));
}

SplitState SplitState::zero(std::span<const SurfaceSample> samples) {
  SplitState st;
  for (const auto& s : samples) {
    const auto z = TangentVector::zero(s.normal);
    st.d1.push_back(z);
    st.d2.push_back(z);
    st.b1.push_back(z);
    st.b2.push_back(z);
  }
  return st;
}

SplitState SplitState::matching(std::span<const SurfaceSample> samples) {
  SplitState st = zero(samples);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    st.d1[k] = TangentVector(samples[k].normal, samples[k].dn_xi(0));
    st.d2[k] = TangentVector(samples[k].normal, samples[k].dn_xi(1));
  }
  return st;
}

double max_normal_component(const SplitState& state, std::span<const SurfaceSample> samples) {
  check_sizes(samples, state);
  double worst = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Vec3& n = samples[k].normal.vec();
    for (const auto* field : {&state.d1, &state.d2, &state.b1, &state.b2})
      worst = std::max(worst, std::abs((*field)[k].vec().dot(n)));
  }
  return worst;
}

double augmented_lagrangian(std::span<const SurfaceSample> samples, const SplitState& state,
                            const LossTerm& loss, const AdmmConfig& cfg) {
  check_sizes(samples, state);
  CompensatedSum sum;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const NodeTerms t = node_terms(samples[k], state, k);
    sum += (cfg.beta * t.d_norm + 0.5 * cfg.lambda * (t.r[0].squaredNorm() + t.r[1].squaredNorm())) *
           samples[k].area_weight;
  }
  return loss.value(samples) + sum.value();
}

double lagrangian_shape_derivative(std::span<const SurfaceSample> samples, const SplitState& state,
                                   const LossTerm& loss, const VectorField& v,
                                   const AdmmConfig& cfg) {
  check_sizes(samples, state);
  const LossLinearization lin = loss.linearize(samples);
  const auto vars = node_variations(samples, v);
  CompensatedSum sum;
  for (std::size_t k = 0; k < samples.size(); ++k)
    sum += lagrangian_density(samples[k], k, state, lin, cfg, vars[k]);
  return sum.value();
}

double fd_lagrangian_shape_derivative(const SurfaceChart& chart, const QuadratureGrid& grid,
                                      std::span<const SurfaceSample> samples,
                                      const SplitState& state, const LossTerm& loss,
                                      const VectorField& v, const AdmmConfig& cfg, double eps) {
  auto at = [&](double e) {
    const Samples moved = pushed_forward(samples, sample(perturb_chart(chart, v, e, grid), grid));
    return augmented_lagrangian(moved, state, loss, cfg);
  };
  return (at(eps) - at(-eps)) / (2.0 * eps);
}

RadialBasis::RadialBasis(const QuadratureGrid& grid, int degree)
    : grid_(grid), degree_(degree), directions_(grid.size()) {
  const std::size_t m = size();
  harmonics_.resize(grid.size() * m);
  parallel_for(grid.size(), [&](std::size_t k) {
    const auto& node = grid.node(k);
    const auto y = spherical_harmonics<2>(degree_, node.theta, node.phi);
    std::copy(y.begin(), y.end(), harmonics_.begin() + static_cast<std::ptrdiff_t>(k * m));
    directions_[k] = radial_direction<2>(node.theta, node.phi);
  });
}

std::vector<double> lagrangian_gradient(std::span<const SurfaceSample> samples,
                                        const SplitState& state, const LossTerm& loss,
                                        const AdmmConfig& cfg, const RadialBasis& basis) {
  check_sizes(samples, state);
  if (samples.size() != basis.grid().size())
    throw std::invalid_argument("basis grid does not match the samples");
  constexpr int kCoeffs = Jet<2>::kSize;
  const LossLinearization lin = loss.linearize(samples);

  // The derivative density is linear in the order-2 jet of V at the node;
  // record its value on each unit jet.
  std::vector<std::array<std::array<double, kCoeffs>, 3>> density(samples.size());
  parallel_for(samples.size(), [&](std::size_t k) {
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i <= 2; ++i)
        for (int j = 0; i + j <= 2; ++j) {
          FieldJet unit;
          unit.w[a].coeff_ref(i, j) = 1.0;
          const NodeVariation var = node_variation(samples[k], unit);
          density[k][a][jet_detail::index_of(i, j)] = lagrangian_density(samples[k], k, state, lin, cfg, var);
        }
  });

  std::vector<double> grad(basis.size(), 0.0);
  parallel_for(basis.size(), [&](std::size_t j) {
    CompensatedSum sum;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const Jet<2>& y = basis.harmonic(k, j);
      const JetVec3<2>& omega = basis.direction(k);
      double acc = 0.0;
      for (int a = 0; a < 3; ++a) {
        const Jet<2> w = y * omega[a];
        for (int c = 0; c < kCoeffs; ++c) acc += density[k][a][c] * w[c];
      }
      sum += acc;
    }
    grad[j] = sum.value();
  });
  return grad;
}

SurfaceChart to_radial_chart(const SurfaceChart& chart, int degree) {
  if (!chart.is_plain())
    throw InvalidChart("optimization needs an untransformed sphere or radial chart");
  switch (chart.kind()) {
    case SurfaceChart::Kind::sphere:
      return SurfaceChart::radial(HarmonicExpansion::constant(chart.radius()).resized(degree));
    case SurfaceChart::Kind::radial: {
      const auto& rho = chart.radius_function();
      return SurfaceChart::radial(rho.resized(std::max(degree, rho.degree())));
    }
    case SurfaceChart::Kind::ellipsoid:
      break;
  }
  throw InvalidChart("optimization needs a sphere or radial chart, not an ellipsoid");
}

ShapeStep shape_gradient_step(const SurfaceChart& chart, std::span<const SurfaceSample> samples,
                              const SplitState& state, const LossTerm& loss,
                              const AdmmConfig& cfg, const RadialBasis& basis) {
  if (chart.kind() != SurfaceChart::Kind::radial || !chart.is_plain())
    throw InvalidChart("shape steps need a radial chart");
  const HarmonicExpansion rho = chart.radius_function().resized(basis.degree());
  if (rho.degree() != chart.radius_function().degree())
    throw InvalidChart("radius expansion degree does not match the gradient basis");

  const double l0 = augmented_lagrangian(samples, state, loss, cfg);
  const std::vector<double> grad = lagrangian_gradient(samples, state, loss, cfg, basis);
  std::vector<double> dir(grad.size());
  double slope = 0.0;
  for (std::size_t j = 0; j < grad.size(); ++j) {
    dir[j] = -grad[j] * cfg.gradient_metric.weight(harmonic_lm(j).l);
    slope += grad[j] * dir[j];
  }

  auto unchanged = [&] {
    return ShapeStep{chart, Samples(samples.begin(), samples.end()), l0, 0.0};
  };
  const double noise = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(l0));
  if (!(-slope * cfg.step_size > noise)) return unchanged();

  double t = cfg.step_size;
  for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, t *= 0.5) {
    HarmonicExpansion trial = rho;
    for (std::size_t j = 0; j < dir.size(); ++j) trial.coefficients()[j] += t * dir[j];
    try {
      SurfaceChart next = SurfaceChart::radial(trial, basis.grid());
      Samples moved = pushed_forward(samples, sample(next, basis.grid()));
      const double l = augmented_lagrangian(moved, state, loss, cfg);
      if (!cfg.line_search || l <= l0 + kArmijo * t * slope)
        return {std::move(next), std::move(moved), l, t};
    } catch (const InvalidChart& e) {
      // the configured chart was fine; the step took it out of the radial class
      if (!cfg.line_search) throw LostStarShape(std::string("shape step left the radial charts: ") + e.what());
    } catch (const DegenerateMetric&) {
      if (!cfg.line_search) throw;
    }
  }
  std::ostringstream msg;
  msg << "no decrease of the augmented Lagrangian after " << kMaxHalvings << " halvings (L = " << l0
      << ", slope = " << slope << ")";
  throw LineSearchFailed(msg.str());
}

TransportResult transport_state(const SplitState& state, std::span<const UnitNormal> old_normals,
                                std::span<const UnitNormal> new_normals,
                                std::span<const std::array<TangentVector, 2>> old_frames) {
  const std::size_t n = state.size();
  if (old_normals.size() != n || new_normals.size() != n || old_frames.size() != n)
    throw std::invalid_argument("transport: size mismatch");
  TransportResult out{state, std::vector<std::array<TangentVector, 2>>(n)};
  parallel_for(n, [&](std::size_t k) {
    const UnitNormal& a = old_normals[k];
    const UnitNormal& b = new_normals[k];
    auto move = [&](const TangentVector& v) { return sphere::parallel_transport(a, b, TangentVector(a, v.vec())); };
    out.state.d1[k] = move(state.d1[k]);
    out.state.d2[k] = move(state.d2[k]);
    out.state.b1[k] = move(state.b1[k]);
    out.state.b2[k] = move(state.b2[k]);
    out.frames[k] = {move(old_frames[k][0]), move(old_frames[k][1])};
  });
  return out;
}

SplitState shrinkage(std::span<const SurfaceSample> samples, const SplitState& state,
                     const AdmmConfig& cfg) {
  check_sizes(samples, state);
  SplitState out = state;
  const double kappa = cfg.beta / cfg.lambda;
  parallel_for(samples.size(), [&](std::size_t k) {
    const auto& s = samples[k];
    const Vec3 q1 = s.dn_xi(0) + state.b1[k].vec();
    const Vec3 q2 = s.dn_xi(1) + state.b2[k].vec();
    const double norm = std::sqrt(q1.squaredNorm() + q2.squaredNorm());
    const double factor = norm > 0.0 ? std::max(norm - kappa, 0.0) / norm : 0.0;
    out.d1[k] = TangentVector(s.normal, factor * q1);
    out.d2[k] = TangentVector(s.normal, factor * q2);
  });
  return out;
}

SplitState multiplier_update(std::span<const SurfaceSample> samples, const SplitState& state) {
  check_sizes(samples, state);
  SplitState out = state;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    out.b1[k] = TangentVector(s.normal, state.b1[k].vec() + s.dn_xi(0) - state.d1[k].vec());
    out.b2[k] = TangentVector(s.normal, state.b2[k].vec() + s.dn_xi(1) - state.d2[k].vec());
  }
  return out;
}

double constraint_residual(std::span<const SurfaceSample> samples, const SplitState& state) {
  check_sizes(samples, state);
  CompensatedSum sum;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    sum += ((state.d1[k].vec() - s.dn_xi(0)).squaredNorm() + (state.d2[k].vec() - s.dn_xi(1)).squaredNorm()) *
           s.area_weight;
  }
  return std::sqrt(sum.value());
}

namespace {

std::vector<UnitNormal> normals_of(std::span<const SurfaceSample> samples) {
  std::vector<UnitNormal> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.normal);
  return out;
}

std::vector<std::array<TangentVector, 2>> frames_of(std::span<const SurfaceSample> samples) {
  std::vector<std::array<TangentVector, 2>> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.frame);
  return out;
}

void require_finite(const TraceRow& row) {
  for (double v : {row.lagrangian, row.tv, row.loss, row.residual, row.area, row.volume})
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite value in the trace at sweep " << row.sweep;
      throw NonFinite(msg.str());
    }
}

}  // namespace

RunResult run(const SurfaceChart& initial, const QuadratureGrid& grid, const LossTerm& loss,
              const AdmmConfig& cfg, const SweepObserver& observer) {
  cfg.validate();
  SurfaceChart chart = to_radial_chart(initial, cfg.degree);
  Samples samples = sample(chart, grid);
  RunResult result{initial, {}, SplitState::zero(samples), false};
  if (cfg.max_sweeps == 0) return result;

  const RadialBasis basis(grid, chart.radius_function().degree());
  SplitState state = result.state;
  std::optional<double> previous;

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    AdmmConfig step_cfg = cfg;
    std::optional<ShapeStep> step;
    std::optional<TransportResult> moved;
    for (int retry = 0;; ++retry) {
      try {
        step = ShapeStep{chart, samples, 0.0, 0.0};
        for (int s = 0; s < cfg.shape_steps_per_sweep; ++s)
          step = shape_gradient_step(step->chart, step->samples, state, loss, step_cfg, basis);
        moved = transport_state(state, normals_of(samples), normals_of(step->samples), frames_of(samples));
        break;
      } catch (const AntipodalPoints&) {
        if (retry == kMaxTransportRetries) throw;
        step_cfg.step_size *= 0.5;
      }
    }

    chart = std::move(step->chart);
    std::vector<std::array<Vec3, 2>> frames(moved->frames.size());
    for (std::size_t k = 0; k < frames.size(); ++k) frames[k] = {moved->frames[k][0].vec(), moved->frames[k][1].vec()};
    samples = with_frames(std::move(step->samples), frames);

    state = shrinkage(samples, moved->state, cfg);
    state = multiplier_update(samples, state);
    state.iteration = sweep;

    TraceRow row;
    row.sweep = sweep;
    row.lagrangian = augmented_lagrangian(samples, state, loss, cfg);
    row.tv = tv_of_normal(samples);
    row.loss = loss.value(samples);
    row.residual = constraint_residual(samples, state);
    row.area = area(samples);
    row.volume = volume(samples);
    require_finite(row);
    result.trace.push_back(row);
    if (observer) observer(row, chart);

    const bool objective_settled =
        previous && std::abs(row.lagrangian - *previous) <= cfg.tol_objective * std::abs(*previous);
    previous = row.lagrangian;
    if (row.residual < cfg.tol_residual && objective_settled) {
      result.converged = true;
      break;
    }
  }
  result.chart = chart;
  result.state = std::move(state);
  return result;
}

}  // namespace tvn
