#include "tvn/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tvn/errors.hpp"
#include "tvn/functionals.hpp"

namespace tvn {

using nlohmann::json;

namespace {

template <class Enum>
struct EnumName {
  Enum value;
  const char* name;
};

constexpr EnumName<ChartSpec::Kind> kChartKinds[] = {
    {ChartSpec::Kind::sphere, "sphere"},
    {ChartSpec::Kind::ellipsoid, "ellipsoid"},
    {ChartSpec::Kind::radial, "radial"},
};
constexpr EnumName<LossTerm::Kind> kLossKinds[] = {
    {LossTerm::Kind::none, "none"},
    {LossTerm::Kind::area_penalty, "area_penalty"},
    {LossTerm::Kind::volume_penalty, "volume_penalty"},
    {LossTerm::Kind::normal_tracking, "normal_tracking"},
    {LossTerm::Kind::area_multiplier, "area_multiplier"},
};
constexpr EnumName<FieldBattery::Kind> kFieldKinds[] = {
    {FieldBattery::Kind::normal_harmonic, "normal_harmonic"},
    {FieldBattery::Kind::radial_harmonic, "radial_harmonic"},
    {FieldBattery::Kind::trigonometric, "trigonometric"},
};
constexpr EnumName<GradientMetric::Kind> kMetricKinds[] = {
    {GradientMetric::Kind::l2, "l2"},
    {GradientMetric::Kind::sobolev, "sobolev"},
};

template <class Enum, std::size_t N>
std::string to_name(Enum v, const EnumName<Enum> (&table)[N]) {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  throw ConfigError("unnamed enum value");
}

template <class Enum, std::size_t N>
Enum from_name(const std::string& s, const EnumName<Enum> (&table)[N], const std::string& where) {
  for (const auto& e : table)
    if (s == e.name) return e.value;
  std::string known;
  for (const auto& e : table) known += std::string(known.empty() ? "" : ", ") + e.name;
  throw ConfigError(where + ": unknown value \"" + s + "\" (expected one of " + known + ")");
}

// Reads the keys of one JSON object, rejecting keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    used_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string path(const char* key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) throw ConfigError(where_ + ": unknown key \"" + key + "\"");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

json chart_to_json(const ChartSpec& c) {
  json terms = json::array();
  for (const auto& t : c.terms) terms.push_back({t.l, t.m, t.c});
  return {{"kind", to_name(c.kind, kChartKinds)},
          {"radius", c.radius},
          {"axes", {c.axes[0], c.axes[1], c.axes[2]}},
          {"harmonics", terms}};
}

ChartSpec chart_from_json(const json& j, const std::string& where) {
  ChartSpec c;
  Reader r(j, where);
  std::string kind = to_name(c.kind, kChartKinds);
  r.get("kind", kind);
  c.kind = from_name(kind, kChartKinds, r.path("kind"));
  r.get("radius", c.radius);
  std::vector<double> axes{c.axes[0], c.axes[1], c.axes[2]};
  r.get("axes", axes);
  if (axes.size() != 3) throw ConfigError(r.path("axes") + ": expected three semi-axes");
  c.axes = Vec3(axes[0], axes[1], axes[2]);
  std::vector<std::vector<double>> terms;
  r.get("harmonics", terms);
  for (const auto& t : terms) {
    if (t.size() != 3 || t[0] != std::floor(t[0]) || t[1] != std::floor(t[1]))
      throw ConfigError(r.path("harmonics") + ": each entry must be [l, m, coefficient] with integer l, m");
    c.terms.push_back({static_cast<int>(t[0]), static_cast<int>(t[1]), t[2]});
  }
  r.finish();
  return c;
}

json admm_to_json(const AdmmConfig& a) {
  return {{"beta", a.beta},
          {"lambda", a.lambda},
          {"shape_steps_per_sweep", a.shape_steps_per_sweep},
          {"step_size", a.step_size},
          {"line_search", a.line_search},
          {"max_sweeps", a.max_sweeps},
          {"tol_residual", a.tol_residual},
          {"tol_objective", a.tol_objective},
          {"gradient_metric", to_name(a.gradient_metric.kind, kMetricKinds)},
          {"sobolev_exponent", a.gradient_metric.s},
          {"eps_reg", a.eps_reg},
          {"degree", a.degree}};
}

AdmmConfig admm_from_json(const json& j) {
  AdmmConfig a;
  Reader r(j, "admm");
  r.get("beta", a.beta);
  r.get("lambda", a.lambda);
  r.get("shape_steps_per_sweep", a.shape_steps_per_sweep);
  r.get("step_size", a.step_size);
  r.get("line_search", a.line_search);
  r.get("max_sweeps", a.max_sweeps);
  r.get("tol_residual", a.tol_residual);
  r.get("tol_objective", a.tol_objective);
  std::string metric = to_name(a.gradient_metric.kind, kMetricKinds);
  r.get("gradient_metric", metric);
  a.gradient_metric.kind = from_name(metric, kMetricKinds, r.path("gradient_metric"));
  r.get("sobolev_exponent", a.gradient_metric.s);
  r.get("eps_reg", a.eps_reg);
  r.get("degree", a.degree);
  r.finish();
  return a;
}

json loss_to_json(const LossSpec& l) {
  json j = {{"kind", to_name(l.kind, kLossKinds)}, {"weight", l.weight}};
  j["target"] = l.target ? json(*l.target) : json(nullptr);
  j["target_chart"] = l.target_chart ? chart_to_json(*l.target_chart) : json(nullptr);
  return j;
}

LossSpec loss_from_json(const json& j) {
  LossSpec l;
  Reader r(j, "loss");
  std::string kind = to_name(l.kind, kLossKinds);
  r.get("kind", kind);
  l.kind = from_name(kind, kLossKinds, r.path("kind"));
  r.get("weight", l.weight);
  if (const json* t = r.child("target"); t && !t->is_null()) {
    if (!t->is_number()) throw ConfigError("loss.target: expected a number or null");
    l.target = t->get<double>();
  }
  if (const json* t = r.child("target_chart"); t && !t->is_null())
    l.target_chart = chart_from_json(*t, "loss.target_chart");
  r.finish();
  return l;
}

json fields_to_json(const FieldBattery& f) {
  json kinds = json::array();
  for (auto k : f.kinds) kinds.push_back(to_name(k, kFieldKinds));
  return {{"count", f.count},
          {"degree", f.degree},
          {"amplitude", f.amplitude},
          {"kinds", kinds},
          {"include_zero", f.include_zero}};
}

FieldBattery fields_from_json(const json& j) {
  FieldBattery f;
  Reader r(j, "fields");
  r.get("count", f.count);
  r.get("degree", f.degree);
  r.get("amplitude", f.amplitude);
  r.get("include_zero", f.include_zero);
  if (j.contains("kinds")) {
    std::vector<std::string> names;
    r.get("kinds", names);
    f.kinds.clear();
    for (const auto& n : names) f.kinds.push_back(from_name(n, kFieldKinds, r.path("kinds")));
  }
  r.finish();
  return f;
}

std::string resolution_string(int n_theta, int n_phi) {
  return std::to_string(n_theta) + "x" + std::to_string(n_phi);
}

}  // namespace

const std::vector<std::string>& functional_names() {
  static const std::vector<std::string> names{"tv_normal", "total_curvature", "total_abs_gauss",
                                              "gauss_bonnet_residual", "area", "volume"};
  return names;
}

std::pair<int, int> parse_resolution(const std::string& text) {
  const auto x = text.find('x');
  auto number = [&](const std::string& s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw ConfigError("resolution \"" + text + "\": expected NxM with positive integers");
    const long v = std::stol(s);
    if (v < 1 || v > 100000) throw ConfigError("resolution \"" + text + "\": out of range");
    return static_cast<int>(v);
  };
  if (x == std::string::npos) throw ConfigError("resolution \"" + text + "\": expected NxM");
  return {number(text.substr(0, x)), number(text.substr(x + 1))};
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  Reader r(j, "config");
  if (const json* c = r.child("chart")) cfg.chart = chart_from_json(*c, "chart");
  std::string res = resolution_string(cfg.n_theta, cfg.n_phi);
  r.get("resolution", res);
  std::tie(cfg.n_theta, cfg.n_phi) = parse_resolution(res);
  r.get("functionals", cfg.functionals);
  if (const json* f = r.child("fields")) cfg.fields = fields_from_json(*f);
  r.get("fd_eps", cfg.fd_eps);
  r.get("radii", cfg.radii);
  r.get("aspect_ratios", cfg.aspect_ratios);
  if (const json* a = r.child("admm")) cfg.admm = admm_from_json(*a);
  if (const json* l = r.child("loss")) cfg.loss = loss_from_json(*l);
  r.get("checkpoint_every", cfg.checkpoint_every);
  r.get("output", cfg.output);
  r.get("seed", cfg.seed);
  r.finish();
  validate(cfg);
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  const json j = {{"chart", chart_to_json(cfg.chart)},
                  {"resolution", resolution_string(cfg.n_theta, cfg.n_phi)},
                  {"functionals", cfg.functionals},
                  {"fields", fields_to_json(cfg.fields)},
                  {"fd_eps", cfg.fd_eps},
                  {"radii", cfg.radii},
                  {"aspect_ratios", cfg.aspect_ratios},
                  {"admm", admm_to_json(cfg.admm)},
                  {"loss", loss_to_json(cfg.loss)},
                  {"checkpoint_every", cfg.checkpoint_every},
                  {"output", cfg.output},
                  {"seed", cfg.seed}};
  return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config file " + path.string());
  return parse_config(buf.str());
}

void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  const int degree = cfg.chart.harmonic_degree();
  if (cfg.n_theta < 2 * degree + 2) {
    std::ostringstream msg;
    msg << "resolution " << resolution_string(cfg.n_theta, cfg.n_phi) << " is too coarse for harmonic degree "
        << degree << " (need N_theta >= " << 2 * degree + 2 << ")";
    fail(msg.str());
  }
  if (cfg.n_phi < 3) fail("resolution: N_phi must be at least 3");
  switch (cfg.chart.kind) {
    case ChartSpec::Kind::sphere:
      if (!(cfg.chart.radius > 0.0)) fail("chart.radius must be positive");
      break;
    case ChartSpec::Kind::radial:
      break;  // positivity of rho is checked when the chart is built
    case ChartSpec::Kind::ellipsoid:
      if (!(cfg.chart.axes.minCoeff() > 0.0)) fail("chart.axes must be positive");
      break;
  }
  for (const auto& name : cfg.functionals)
    if (std::find(functional_names().begin(), functional_names().end(), name) == functional_names().end())
      fail("functionals: unknown functional \"" + name + "\"");
  if (cfg.fields.count < 0) fail("fields.count must be >= 0");
  if (cfg.fields.degree < 0) fail("fields.degree must be >= 0");
  if (!(cfg.fields.amplitude > 0.0)) fail("fields.amplitude must be positive");
  if (cfg.fields.kinds.empty() && cfg.fields.count > 0) fail("fields.kinds must not be empty");
  for (double e : cfg.fd_eps)
    if (!(e > 0.0)) fail("fd_eps entries must be positive");
  for (double r : cfg.radii)
    if (!(r > 0.0)) fail("radii entries must be positive");
  for (double a : cfg.aspect_ratios)
    if (!(a > 0.0)) fail("aspect_ratios entries must be positive");
  if (cfg.checkpoint_every < 0) fail("checkpoint_every must be >= 0");
  if (cfg.loss.kind == LossTerm::Kind::normal_tracking && !cfg.loss.target_chart)
    fail("loss.target_chart is required for normal_tracking");
  cfg.admm.validate();
}

LossTerm resolve_loss(const LossSpec& spec, const SurfaceChart& initial, const QuadratureGrid& grid) {
  switch (spec.kind) {
    case LossTerm::Kind::none:
      return LossTerm::none();
    case LossTerm::Kind::area_penalty:
      return LossTerm::area_penalty(spec.target.value_or(area(initial, grid)), spec.weight);
    case LossTerm::Kind::volume_penalty:
      return LossTerm::volume_penalty(spec.target.value_or(volume(initial, grid)), spec.weight);
    case LossTerm::Kind::area_multiplier:
      return LossTerm::area_multiplier(spec.weight, spec.target.value_or(area(initial, grid)));
    case LossTerm::Kind::normal_tracking:
      if (!spec.target_chart) throw ConfigError("loss.target_chart is required for normal_tracking");
      return LossTerm::normal_tracking(build_chart(*spec.target_chart, grid), spec.weight);
  }
  throw ConfigError("unknown loss kind");
}

}  // namespace tvn
