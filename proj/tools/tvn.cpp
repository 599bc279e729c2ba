// Command-line front end.
//
//   tvn eval|derivcheck|stationarity|ellipsoids|optimize
//       [--config FILE] [--out DIR] [--seed N] [--resolution NxM]
//
// Results go to DIR/<subcommand>.csv and to stdout. Exit status: 0 success,
// 2 bad configuration or arguments, 3 numerical failure, 4 I/O failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "tvn/config.hpp"
#include "tvn/errors.hpp"
#include "tvn/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> resolution;
};

tvn::ExperimentConfig effective_config(const Options& opt) {
  tvn::ExperimentConfig cfg = opt.config.empty() ? tvn::ExperimentConfig{} : tvn::load_config(opt.config);
  if (opt.out) cfg.output = *opt.out;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.resolution) std::tie(cfg.n_theta, cfg.n_phi) = tvn::parse_resolution(*opt.resolution);
  tvn::validate(cfg);
  return cfg;
}

int execute(const std::string& command, const Options& opt) {
  const tvn::ExperimentConfig cfg = effective_config(opt);
  const std::filesystem::path out = cfg.output;
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw tvn::IoError("cannot create output directory " + out.string() + ": " + ec.message());

  std::ofstream saved(out / "config.json");
  saved << tvn::serialize_config(cfg);
  if (!saved) throw tvn::IoError("cannot write " + (out / "config.json").string());

  tvn::CsvTable table;
  if (command == "eval")
    table = tvn::cmd_eval(cfg);
  else if (command == "derivcheck")
    table = tvn::cmd_derivcheck(cfg);
  else if (command == "stationarity")
    table = tvn::cmd_stationarity(cfg);
  else if (command == "ellipsoids")
    table = tvn::cmd_ellipsoids(cfg);
  else
    table = tvn::cmd_optimize(cfg, out);

  table.write(out / (command == "optimize" ? "trace.csv" : command + ".csv"));
  std::cout << table.to_string();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Total variation of the normal field of closed surfaces"};
  app.require_subcommand(1);
  Options opt;
  std::string command;
  for (const char* name : {"eval", "derivcheck", "stationarity", "ellipsoids", "optimize"}) {
    static const std::map<std::string, std::string> help{
        {"eval", "TV of the normal and curvature integrals of the chart"},
        {"derivcheck", "analytic shape derivatives against finite differences"},
        {"stationarity", "stationarity residuals of spheres"},
        {"ellipsoids", "TV over equal-area ellipsoids"},
        {"optimize", "split Bregman minimization"}};
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", opt.config, "JSON experiment configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--resolution", opt.resolution, "quadrature grid NthetaxNphi, e.g. 32x64");
    sub->callback([&command, name] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    return execute(command, opt);
  } catch (const tvn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const tvn::InvalidChart& e) {
    std::cerr << "invalid chart: " << e.what() << "\n";
    return kExitConfig;
  } catch (const tvn::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const tvn::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
