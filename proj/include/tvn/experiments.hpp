#pragma once

// The experiments behind the command-line subcommands. Each returns a CSV
// table; numbers are printed with 17 significant digits so that equal runs
// give identical bytes.

#include <filesystem>
#include <string>
#include <vector>

#include "tvn/config.hpp"
#include "tvn/fields.hpp"

namespace tvn {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws std::out_of_range.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;

  std::string to_string() const;
  /// Throws IoError.
  void write(const std::filesystem::path& path) const;
};

std::string format_number(double v);

struct NamedField {
  std::string id;
  VectorField field;
};

/// The random fields of the battery, reproducible from the seed.
std::vector<NamedField> make_battery(const FieldBattery& battery, std::uint64_t seed);

/// One row with the selected functionals of the configured chart.
CsvTable cmd_eval(const ExperimentConfig& cfg);

/// Analytic derivatives against central differences for every field of the
/// battery and every eps. Columns: operation, field, eps, analytic, fd,
/// abs_err, rel_err. Nodewise operations report max-norms over the nodes.
CsvTable cmd_derivcheck(const ExperimentConfig& cfg);

/// Sphere stationarity residuals over the radii and random normal fields,
/// with wrong-multiplier controls. Columns: constraint, radius, field, mu, residual.
CsvTable cmd_stationarity(const ExperimentConfig& cfg);

/// TV over the ellipsoids with semi-axes (p, q, 1), p, q from aspect_ratios,
/// rescaled to area 4 pi. Columns: a, b, c, area, tv, excess, perm_spread, is_min.
CsvTable cmd_ellipsoids(const ExperimentConfig& cfg);

/// Runs the split Bregman solver on the configured chart, writing OBJ
/// meshes into `out_dir`. Returns the trace (sweep, lagrangian, tv, loss,
/// residual, area, volume).
CsvTable cmd_optimize(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace tvn
