#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "tvn/config.hpp"
#include "tvn/errors.hpp"
#include "tvn/experiments.hpp"

using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("tvn_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

TEST(Experiments, EvalOnTheUnitSphere) {
  tvn::ExperimentConfig cfg;
  cfg.n_theta = 32;
  const auto t = tvn::cmd_eval(cfg);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_NEAR(t.number(0, "tv_normal"), 17.7715318, 1e-7);
  EXPECT_NEAR(t.number(0, "total_abs_gauss"), 4 * pi, 1e-10);
  EXPECT_LT(t.number(0, "gauss_bonnet_residual"), 1e-10);

  cfg.functionals = {"volume", "tv_normal"};
  const auto some = tvn::cmd_eval(cfg);
  EXPECT_EQ(some.header, (std::vector<std::string>{"tv_normal", "volume"}));
}

TEST(Experiments, DerivcheckRows) {
  tvn::ExperimentConfig cfg;
  cfg.chart.kind = tvn::ChartSpec::Kind::ellipsoid;
  cfg.chart.axes = tvn::Vec3(1.3, 1.0, 0.8);
  cfg.n_theta = 10;
  cfg.n_phi = 20;
  cfg.fields.count = 3;
  cfg.fd_eps = {1e-3, 1e-4};
  const auto t = tvn::cmd_derivcheck(cfg);
  EXPECT_EQ(t.header, (std::vector<std::string>{"operation", "field", "eps", "analytic", "fd", "abs_err", "rel_err"}));
  EXPECT_EQ(t.rows.size(), 4u * 2u * 8u);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& field = t.rows[r][t.column("field")];
    if (field == "zero") {
      EXPECT_EQ(t.number(r, "analytic"), 0.0);
      EXPECT_EQ(t.number(r, "fd"), 0.0);
    } else {
      EXPECT_LT(t.number(r, "rel_err"), 1e-4) << t.rows[r][0] << " " << field;
    }
  }
}

TEST(Experiments, StationarityTable) {
  tvn::ExperimentConfig cfg;
  cfg.n_theta = 16;
  cfg.n_phi = 32;
  cfg.fields.count = 3;
  const auto t = tvn::cmd_stationarity(cfg);
  EXPECT_EQ(t.rows.size(), 2u * (2u * 3u + 2u));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string constraint = t.rows[r][0];
    if (constraint.find("wrong") != std::string::npos)
      EXPECT_GT(t.number(r, "residual"), 1e-3);
    else
      EXPECT_LT(t.number(r, "residual"), 1e-6);
  }
}

TEST(Experiments, EllipsoidSweep) {
  tvn::ExperimentConfig cfg;
  cfg.n_theta = 48;
  cfg.n_phi = 96;
  const auto t = tvn::cmd_ellipsoids(cfg);
  ASSERT_EQ(t.rows.size(), 9u);
  int minima = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    EXPECT_NEAR(t.number(r, "area"), 4 * pi, 1e-10);
    EXPECT_LT(t.number(r, "perm_spread"), 1e-8);
    const bool sphere = t.number(r, "a") == t.number(r, "b") && t.number(r, "b") == t.number(r, "c");
    if (t.rows[r].back() == "1") {
      ++minima;
      EXPECT_TRUE(sphere);
      EXPECT_NEAR(t.number(r, "tv"), 4 * sqrt2 * pi, 1e-10);
    } else {
      EXPECT_GT(t.number(r, "excess"), 1e-4);
    }
  }
  EXPECT_EQ(minima, 1);
}

TEST(Experiments, OptimizeWritesTraceAndMeshes) {
  const auto dir = scratch("optimize");
  auto cfg = tvn::parse_config(R"({
    "chart": {"kind": "radial", "radius": 1.0, "harmonics": [[2, 0, 0.15], [3, 2, 0.15]]},
    "resolution": "12x24",
    "admm": {"beta": 0.1, "lambda": 1.0, "step_size": 0.05, "max_sweeps": 4, "degree": 4},
    "checkpoint_every": 2
  })");
  const auto t = tvn::cmd_optimize(cfg, dir);
  EXPECT_EQ(t.header, (std::vector<std::string>{"sweep", "lagrangian", "tv", "loss", "residual", "area", "volume"}));
  ASSERT_EQ(t.rows.size(), 4u);
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (const auto& col : t.header) EXPECT_TRUE(std::isfinite(t.number(r, col)));
  for (const char* f : {"mesh_initial.obj", "mesh_sweep_0002.obj", "mesh_sweep_0004.obj", "mesh_final.obj"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  EXPECT_FALSE(std::filesystem::exists(dir / "mesh_sweep_0001.obj"));
  const auto mesh = tvn::read_mesh(dir / "mesh_final.obj");
  EXPECT_EQ(mesh.vertices.size(), 12u * 24u + 2u);
}

TEST(Experiments, OptimizeChecksTheDegreeAgainstTheGrid) {
  auto cfg = tvn::parse_config(R"({"resolution": "8x16", "admm": {"degree": 6}})");
  EXPECT_THROW(tvn::cmd_optimize(cfg, scratch("degree")), tvn::ConfigError);
}

TEST(Experiments, StationaryStartStopsEarly) {
  auto cfg = tvn::parse_config(R"({
    "chart": {"kind": "sphere", "radius": 1.0},
    "resolution": "16x32",
    "admm": {"beta": 0.001, "lambda": 1.0, "step_size": 0.05, "max_sweeps": 20,
             "tol_residual": 1e-3, "tol_objective": 1e-4, "degree": 4},
    "loss": {"kind": "area_penalty", "target": 12.566370614359172}
  })");
  const auto t = tvn::cmd_optimize(cfg, scratch("stationary"));
  EXPECT_LE(t.rows.size(), 3u);
  EXPECT_LT(t.number(t.rows.size() - 1, "residual"), 1e-3);
}

TEST(Experiments, OutputIsDeterministic) {
  tvn::ExperimentConfig cfg;
  cfg.n_theta = 8;
  cfg.n_phi = 16;
  cfg.fields.count = 3;
  cfg.seed = 99;
  EXPECT_EQ(tvn::cmd_derivcheck(cfg).to_string(), tvn::cmd_derivcheck(cfg).to_string());
  EXPECT_EQ(tvn::cmd_stationarity(cfg).to_string(), tvn::cmd_stationarity(cfg).to_string());
  auto other = cfg;
  other.seed = 100;
  EXPECT_NE(tvn::cmd_stationarity(cfg).to_string(), tvn::cmd_stationarity(other).to_string());
}

TEST(Experiments, BatteryIsReproducible) {
  tvn::FieldBattery b;
  b.count = 5;
  const auto x = tvn::make_battery(b, 4);
  const auto y = tvn::make_battery(b, 4);
  ASSERT_EQ(x.size(), 6u);
  EXPECT_EQ(x[0].id, "zero");
  EXPECT_EQ(x[1].id, "normal_harmonic_0");
  const auto p = tvn::ChartPoint{0.7, 1.1, tvn::SurfaceChart::sphere(1.0).evaluate(0.7, 1.1)};
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_EQ(tvn::value_of(x[i].field.evaluate(p).w), tvn::value_of(y[i].field.evaluate(p).w));
}

// Runs the command-line tool and returns its exit status.
int run_cli(const std::string& args) {
  const std::string cmd = std::string(TVN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const std::string out = " --out " + (dir / "out").string();
  EXPECT_EQ(run_cli("eval --resolution 8x16" + out), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "eval.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "config.json"));
  EXPECT_EQ(run_cli("eval --config " + write("bad.json", R"({"chart": {"kind": "cube"}})") + out), 2);
  EXPECT_EQ(run_cli("eval --resolution 8by16" + out), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli(""), 2);
  // a radial chart whose radius function changes sign
  EXPECT_EQ(run_cli("eval --config " +
                    write("neg.json", R"({"chart": {"kind": "radial", "radius": 0.1, "harmonics": [[1, 0, 1.0]]}})") +
                    out),
            2);
  // an unguarded huge step drives the radius negative
  EXPECT_EQ(run_cli("optimize --config " +
                    write("fail.json", R"({"chart": {"kind": "radial", "harmonics": [[2, 0, 0.2]]},
                                          "resolution": "12x24", "admm": {"max_sweeps": 2, "degree": 4,
                                          "step_size": 1000.0, "line_search": false}})") +
                    out),
            3);
  write("blocker", "");
  EXPECT_EQ(run_cli("eval --resolution 8x16 --out " + (dir / "blocker" / "sub").string()), 4);
}

TEST(Cli, SeedFlagOverridesTheConfig) {
  const auto dir = scratch("seed");
  const std::string base = "stationarity --resolution 8x16 --out ";
  ASSERT_EQ(run_cli(base + (dir / "a").string() + " --seed 5"), 0);
  ASSERT_EQ(run_cli(base + (dir / "b").string() + " --seed 5"), 0);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  EXPECT_EQ(slurp(dir / "a" / "stationarity.csv"), slurp(dir / "b" / "stationarity.csv"));
  EXPECT_NE(slurp(dir / "a" / "config.json").find("\"seed\": 5"), std::string::npos);
}

}  // namespace
