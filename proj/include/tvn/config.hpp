#pragma once

// Experiment configuration, stored as JSON:
//
//   {
//     "chart": {"kind": "radial", "radius": 1.0, "axes": [1, 1, 1],
//               "harmonics": [[2, 0, 0.15], [3, 2, 0.15]]},
//     "resolution": "32x64",
//     "seed": 7,
//     "output": "out",
//     "admm": {"beta": 0.1, "lambda": 1.0, ...},
//     "loss": {"kind": "area_penalty", "target": null, "weight": 1.0},
//     ...
//   }
//
// Every key is optional; unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tvn/split_bregman.hpp"
#include "tvn/surface.hpp"

namespace tvn {

/// Random perturbation fields used by derivcheck and stationarity.
struct FieldBattery {
  enum class Kind { normal_harmonic, radial_harmonic, trigonometric };
  int count = 4;
  int degree = 3;
  double amplitude = 0.3;
  std::vector<Kind> kinds{Kind::normal_harmonic, Kind::radial_harmonic, Kind::trigonometric};
  bool include_zero = true;

  bool operator==(const FieldBattery&) const = default;
};

struct LossSpec {
  LossTerm::Kind kind = LossTerm::Kind::area_penalty;
  /// Target area/volume; unset means the value of the initial chart.
  std::optional<double> target;
  /// Penalty weight, or the multiplier for area_multiplier.
  double weight = 1.0;
  /// Surface whose normals are tracked (normal_tracking only).
  std::optional<ChartSpec> target_chart;

  bool operator==(const LossSpec&) const = default;
};

struct ExperimentConfig {
  ChartSpec chart;
  int n_theta = 32;
  int n_phi = 64;
  /// Columns of `eval`; empty means all.
  std::vector<std::string> functionals;
  FieldBattery fields;
  std::vector<double> fd_eps{1e-3, 1e-4, 1e-5};
  std::vector<double> radii{1.0, 3.0};
  std::vector<double> aspect_ratios{0.8, 1.0, 1.25};
  AdmmConfig admm;
  LossSpec loss;
  /// Mesh export period in sweeps (0: initial and final only).
  int checkpoint_every = 10;
  std::string output = "out";
  std::uint64_t seed = 0;

  QuadratureGrid grid() const { return {n_theta, n_phi}; }
  bool operator==(const ExperimentConfig&) const = default;
};

/// Names accepted in ExperimentConfig::functionals, in column order.
const std::vector<std::string>& functional_names();

/// Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);
/// Throws IoError if the file cannot be read, ConfigError if it is invalid.
ExperimentConfig load_config(const std::filesystem::path& path);

/// "NxM" -> (N, M). Throws ConfigError.
std::pair<int, int> parse_resolution(const std::string& text);

/// Checks value ranges and N_theta >= 2L + 2 for the chart's degree L.
/// Throws ConfigError.
void validate(const ExperimentConfig& cfg);

/// Loss term with unset targets resolved against `initial`.
LossTerm resolve_loss(const LossSpec& spec, const SurfaceChart& initial, const QuadratureGrid& grid);

}  // namespace tvn
