#include "tvn/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "tvn/errors.hpp"
#include "tvn/functionals.hpp"
#include "tvn/numeric.hpp"
#include "tvn/shape_calculus.hpp"
#include "tvn/split_bregman.hpp"

namespace tvn {

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::out_of_range("no column " + name);
  return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  return std::stod(rows.at(row).at(column(name)));
}

std::string CsvTable::to_string() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << to_string();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

namespace {

using std::numbers::pi;

const char* kind_name(FieldBattery::Kind k) {
  switch (k) {
    case FieldBattery::Kind::normal_harmonic:
      return "normal_harmonic";
    case FieldBattery::Kind::radial_harmonic:
      return "radial_harmonic";
    case FieldBattery::Kind::trigonometric:
      return "trigonometric";
  }
  return "?";
}

HarmonicExpansion random_expansion(std::mt19937_64& rng, int degree, double amplitude) {
  std::normal_distribution<double> g(0.0, amplitude);
  HarmonicExpansion h(degree);
  for (auto& c : h.coefficients()) c = g(rng);
  return h;
}

VectorField random_trig_field(std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> amp(-amplitude, amplitude);
  std::uniform_real_distribution<double> freq(-1.5, 1.5);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
  std::vector<VectorField::TrigTerm> terms;
  for (int t = 0; t < 3; ++t) {
    VectorField::TrigTerm term;
    term.amplitude = Vec3(amp(rng), amp(rng), amp(rng));
    term.frequency = Vec3(freq(rng), freq(rng), freq(rng));
    term.phase = phase(rng);
    terms.push_back(term);
  }
  return VectorField::trigonometric(std::move(terms));
}

SplitState random_state(const Samples& samples, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  auto draw = [&](const UnitNormal& n) { return TangentVector(n, Vec3(g(rng), g(rng), g(rng))); };
  SplitState st = SplitState::zero(samples);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    st.d1[k] = draw(samples[k].normal);
    st.d2[k] = draw(samples[k].normal);
    st.b1[k] = draw(samples[k].normal);
    st.b2[k] = draw(samples[k].normal);
  }
  return st;
}

struct Comparison {
  double analytic = 0.0;
  double fd = 0.0;
  double abs_err = 0.0;
};

double relative(const Comparison& c) {
  const double scale = std::max(std::abs(c.analytic), std::abs(c.fd));
  return scale > 0.0 ? c.abs_err / scale : 0.0;
}

Comparison scalar_comparison(double analytic, double fd) { return {analytic, fd, std::abs(analytic - fd)}; }

// Max-norm summary of nodewise vector quantities.
struct NodewiseComparison {
  double analytic = 0.0;
  double fd = 0.0;
  double abs_err = 0.0;

  void add(const Eigen::VectorXd& a, const Eigen::VectorXd& f) {
    analytic = std::max(analytic, a.norm());
    fd = std::max(fd, f.norm());
    abs_err = std::max(abs_err, (a - f).norm());
  }
  Comparison result() const { return {analytic, fd, abs_err}; }
};

Eigen::VectorXd stack(const Vec3& a, const Vec3& b) {
  Eigen::VectorXd v(6);
  v << a, b;
  return v;
}

Eigen::VectorXd scalar(double x) { return Eigen::VectorXd::Constant(1, x); }

}  // namespace

std::vector<NamedField> make_battery(const FieldBattery& battery, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<NamedField> out;
  if (battery.include_zero) out.push_back({"zero", VectorField::zero()});
  for (int i = 0; i < battery.count; ++i) {
    const auto kind = battery.kinds[static_cast<std::size_t>(i) % battery.kinds.size()];
    const std::string id = std::string(kind_name(kind)) + "_" + std::to_string(i);
    switch (kind) {
      case FieldBattery::Kind::normal_harmonic:
        out.push_back({id, VectorField::normal_harmonic(random_expansion(rng, battery.degree, battery.amplitude))});
        break;
      case FieldBattery::Kind::radial_harmonic:
        out.push_back({id, VectorField::radial_harmonic(random_expansion(rng, battery.degree, battery.amplitude))});
        break;
      case FieldBattery::Kind::trigonometric:
        out.push_back({id, random_trig_field(rng, battery.amplitude)});
        break;
    }
  }
  return out;
}

CsvTable cmd_eval(const ExperimentConfig& cfg) {
  const QuadratureGrid grid = cfg.grid();
  const FunctionalReport r = evaluate_functionals(sample(build_chart(cfg.chart, grid), grid));
  const std::vector<std::pair<std::string, double>> all{
      {"tv_normal", r.tv_normal},
      {"total_curvature", r.total_curvature},
      {"total_abs_gauss", r.total_abs_gauss},
      {"gauss_bonnet_residual", r.gauss_bonnet_residual},
      {"area", r.area},
      {"volume", r.volume}};
  CsvTable t;
  t.rows.emplace_back();
  for (const auto& [name, value] : all) {
    if (!cfg.functionals.empty() &&
        std::find(cfg.functionals.begin(), cfg.functionals.end(), name) == cfg.functionals.end())
      continue;
    t.header.push_back(name);
    t.rows.back().push_back(format_number(value));
  }
  return t;
}

CsvTable cmd_derivcheck(const ExperimentConfig& cfg) {
  const QuadratureGrid grid = cfg.grid();
  const SurfaceChart chart = build_chart(cfg.chart, grid);
  const Samples samples = sample(chart, grid);
  const auto battery = make_battery(cfg.fields, cfg.seed);
  std::mt19937_64 rng(cfg.seed ^ 0x5bd1e995u);
  const SplitState state = random_state(samples, rng, 0.3);
  const LossTerm loss = resolve_loss(cfg.loss, chart, grid);

  const ChartFunctional area_f = [](const Samples& s) { return area(s); };
  const ChartFunctional volume_f = [](const Samples& s) { return volume(s); };
  const ChartFunctional tv_f = [](const Samples& s) { return tv_of_normal(s); };

  CsvTable t;
  t.header = {"operation", "field", "eps", "analytic", "fd", "abs_err", "rel_err"};
  auto emit = [&](const std::string& op, const std::string& field, double eps, const Comparison& c) {
    t.rows.push_back({op, field, format_number(eps), format_number(c.analytic), format_number(c.fd),
                      format_number(c.abs_err), format_number(relative(c))});
  };

  for (const auto& [id, v] : battery) {
    const auto vars = node_variations(samples, v);
    const double d_area = area_shape_derivative(samples, v);
    const double d_volume = volume_shape_derivative(samples, v);
    const double d_tv = tv_shape_derivative(samples, v, 0.0);
    const double d_lagrangian = lagrangian_shape_derivative(samples, state, loss, v, cfg.admm);

    for (double eps : cfg.fd_eps) {
      std::vector<NodeDifference> diffs(samples.size());
      parallel_for(samples.size(), [&](std::size_t k) { diffs[k] = fd_node_variation(chart, samples[k], v, eps); });
      NodewiseComparison normal, frame, dn_xi, integrand;
      for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto& a = vars[k];
        const auto& f = diffs[k];
        normal.add(a.dn, f.dn);
        frame.add(stack(a.dxi[0], a.dxi[1]), stack(f.dxi[0], f.dxi[1]));
        dn_xi.add(stack(a.d_dn_xi(0), a.d_dn_xi(1)), stack(f.d_dn_xi[0], f.d_dn_xi[1]));
        integrand.add(scalar(tv_integrand_variation(samples[k], a, 0.0)), scalar(f.dg));
      }
      emit("material_normal", id, eps, normal.result());
      emit("material_frame", id, eps, frame.result());
      emit("material_Dn_xi", id, eps, dn_xi.result());
      emit("tv_integrand", id, eps, integrand.result());
      emit("area", id, eps, scalar_comparison(d_area, fd_shape_derivative(chart, grid, area_f, v, eps)));
      emit("volume", id, eps, scalar_comparison(d_volume, fd_shape_derivative(chart, grid, volume_f, v, eps)));
      emit("tv_normal", id, eps, scalar_comparison(d_tv, fd_shape_derivative(chart, grid, tv_f, v, eps)));
      emit("lagrangian", id, eps,
           scalar_comparison(d_lagrangian,
                             fd_lagrangian_shape_derivative(chart, grid, samples, state, loss, v, cfg.admm, eps)));
    }
  }
  return t;
}

CsvTable cmd_stationarity(const ExperimentConfig& cfg) {
  const QuadratureGrid grid = cfg.grid();
  std::mt19937_64 rng(cfg.seed);
  CsvTable t;
  t.header = {"constraint", "radius", "field", "mu", "residual"};
  auto emit = [&](const std::string& constraint, double r, const std::string& field, double mu, double res) {
    t.rows.push_back({constraint, format_number(r), field, format_number(mu), format_number(res)});
  };
  for (double r : cfg.radii) {
    const double mu_area = -1.0 / (std::numbers::sqrt2 * r);
    const double mu_volume = -std::numbers::sqrt2 / (r * r);
    for (int i = 0; i < cfg.fields.count; ++i) {
      const auto v = VectorField::normal_harmonic(random_expansion(rng, cfg.fields.degree, cfg.fields.amplitude));
      const std::string id = "normal_harmonic_" + std::to_string(i);
      emit("area", r, id, mu_area, stationarity_residual(r, v, grid, mu_area));
      emit("volume", r, id, mu_volume, volume_stationarity_residual(r, v, grid, mu_volume));
    }
    // controls: uniform normal growth with a multiplier 10% off
    const auto n = VectorField::surface_normal();
    emit("area_wrong_mu", r, "unit_normal", 1.1 * mu_area, stationarity_residual(r, n, grid, 1.1 * mu_area));
    emit("volume_wrong_mu", r, "unit_normal", 1.1 * mu_volume,
         volume_stationarity_residual(r, n, grid, 1.1 * mu_volume));
  }
  return t;
}

CsvTable cmd_ellipsoids(const ExperimentConfig& cfg) {
  const QuadratureGrid grid = cfg.grid();
  const double bound = 4.0 * std::numbers::sqrt2 * pi;
  auto normalized_tv = [&](const Vec3& axes, double* area_out, Vec3* axes_out) {
    const SurfaceChart e = SurfaceChart::ellipsoid(axes[0], axes[1], axes[2]);
    const double s = std::sqrt(4.0 * pi / area(e, grid));
    const Samples samples = sample(SurfaceChart::ellipsoid(s * axes[0], s * axes[1], s * axes[2]), grid);
    if (area_out) *area_out = area(samples);
    if (axes_out) *axes_out = s * axes;
    return tv_of_normal(samples);
  };

  CsvTable t;
  t.header = {"a", "b", "c", "area", "tv", "excess", "perm_spread", "is_min"};
  std::vector<double> tvs;
  for (double p : cfg.aspect_ratios)
    for (double q : cfg.aspect_ratios) {
      const Vec3 axes(p, q, 1.0);
      double a = 0.0;
      Vec3 scaled;
      const double tv = normalized_tv(axes, &a, &scaled);
      std::array<int, 3> perm{0, 1, 2};
      double lo = tv, hi = tv;
      while (std::next_permutation(perm.begin(), perm.end())) {
        const double other = normalized_tv(Vec3(axes[perm[0]], axes[perm[1]], axes[perm[2]]), nullptr, nullptr);
        lo = std::min(lo, other);
        hi = std::max(hi, other);
      }
      tvs.push_back(tv);
      t.rows.push_back({format_number(scaled[0]), format_number(scaled[1]), format_number(scaled[2]),
                        format_number(a), format_number(tv), format_number(tv - bound), format_number(hi - lo),
                        "0"});
    }
  if (!tvs.empty()) {
    const auto best = std::min_element(tvs.begin(), tvs.end()) - tvs.begin();
    t.rows[static_cast<std::size_t>(best)].back() = "1";
  }
  return t;
}

CsvTable cmd_optimize(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  const QuadratureGrid grid = cfg.grid();
  if (cfg.n_theta < 2 * cfg.admm.degree + 2) {
    std::ostringstream msg;
    msg << "resolution " << cfg.n_theta << "x" << cfg.n_phi << " is too coarse for optimization degree "
        << cfg.admm.degree << " (need N_theta >= " << 2 * cfg.admm.degree + 2 << ")";
    throw ConfigError(msg.str());
  }
  const SurfaceChart initial = build_chart(cfg.chart, grid);
  const LossTerm loss = resolve_loss(cfg.loss, initial, grid);

  auto mesh_path = [&](const std::string& tag) { return out_dir / ("mesh_" + tag + ".obj"); };
  export_mesh(initial, grid, mesh_path("initial"));

  CsvTable t;
  t.header = {"sweep", "lagrangian", "tv", "loss", "residual", "area", "volume"};
  const SweepObserver observer = [&](const TraceRow& row, const SurfaceChart& chart) {
    t.rows.push_back({std::to_string(row.sweep), format_number(row.lagrangian), format_number(row.tv),
                      format_number(row.loss), format_number(row.residual), format_number(row.area),
                      format_number(row.volume)});
    if (cfg.checkpoint_every > 0 && row.sweep % cfg.checkpoint_every == 0) {
      std::ostringstream tag;
      tag << "sweep_" << std::setw(4) << std::setfill('0') << row.sweep;
      export_mesh(chart, grid, mesh_path(tag.str()));
    }
  };
  const RunResult result = run(initial, grid, loss, cfg.admm, observer);
  export_mesh(result.chart, grid, mesh_path("final"));
  return t;
}

}  // namespace tvn
