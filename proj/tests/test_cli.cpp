#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "phonon_thermo/cli.hpp"

using namespace phonon_thermo;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("phonon_thermo_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(CliOptions opt) {
    out_.str({});
    err_.str({});
    if (!opt.out) opt.out = dir_.string();
    return run_command(opt, out_, err_);
  }

  std::string write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, EvalDefaults) {
  ASSERT_EQ(run({.command = "eval"}), kExitOk);
  const auto rec = nlohmann::json::parse(out_.str());
  EXPECT_GT(rec["P_e"].get<double>(), 0.0);
  EXPECT_LE(rec["P_e"].get<double>(), 0.5);
  EXPECT_EQ(rec["variant"], "paper");
  EXPECT_EQ(rec["drive_mode"], "bare");
  EXPECT_EQ(rec["T"].get<double>(), 1.0);
  EXPECT_EQ(rec["eta"].get<double>(), 0.6);
  EXPECT_FALSE(rec["drive_renormalized"].get<bool>());
}

TEST_F(CliTest, EvalWeakCouplingHasNoInformation) {
  ASSERT_EQ(run({.command = "eval", .eta = 1e-9}), kExitOk);
  const auto rec = nlohmann::json::parse(out_.str());
  EXPECT_LT(rec["F_Q"].get<double>(), 1e-12);
}

TEST_F(CliTest, EvalVariantsAgreeAtStrongCoupling) {
  ASSERT_EQ(run({.command = "eval", .eta = 40.0, .variant = "paper"}), kExitOk);
  const double paper = nlohmann::json::parse(out_.str())["P_e"].get<double>();
  ASSERT_EQ(run({.command = "eval", .eta = 40.0, .variant = "rederived"}), kExitOk);
  const double rederived = nlohmann::json::parse(out_.str())["P_e"].get<double>();
  EXPECT_NEAR(paper, rederived, 1e-3);
}

TEST_F(CliTest, EvalZeroCouplingReportsUnboundedVariance) {
  ASSERT_EQ(run({.command = "eval", .eta = 0.0}), kExitOk);
  const auto rec = nlohmann::json::parse(out_.str());
  EXPECT_TRUE(rec["variance_bound_single_shot"].is_null());
  EXPECT_TRUE(rec["variance_unbounded"].get<bool>());
}

TEST_F(CliTest, DomainErrorsExitTwo) {
  EXPECT_EQ(run({.command = "eval", .eta = -1.0}), kExitDomain);
  EXPECT_EQ(run({.command = "eval", .temp = 0.0}), kExitDomain);
  EXPECT_FALSE(err_.str().empty());
  const std::string cfg = write_config("bad.json", R"({"bath": {"eta": -1}})");
  EXPECT_EQ(run({.command = "eval", .config_path = cfg}), kExitDomain);
  EXPECT_NE(err_.str().find("eta"), std::string::npos);
}

TEST_F(CliTest, ConfigFileIsApplied) {
  const std::string cfg =
      write_config("c.json", R"({"probe": {"drive_mode": "renormalized"}, "temperature": 0.7})");
  ASSERT_EQ(run({.command = "eval", .config_path = cfg}), kExitOk);
  const auto rec = nlohmann::json::parse(out_.str());
  EXPECT_EQ(rec["drive_mode"], "renormalized");
  EXPECT_TRUE(rec["drive_renormalized"].get<bool>());
  EXPECT_EQ(rec["T"].get<double>(), 0.7);
}

TEST_F(CliTest, MissingConfigFileIsIoError) {
  EXPECT_EQ(run({.command = "eval", .config_path = (dir_ / "nope.json").string()}), kExitIo);
}

TEST_F(CliTest, UnwritableOutputIsIoError) {
  const fs::path blocker = dir_ / "file";
  std::ofstream(blocker) << "x";
  EXPECT_EQ(run({.command = "heatmap", .out = (blocker / "sub").string()}), kExitIo);
}

TEST_F(CliTest, SweepWritesCsvAndSvg) {
  ASSERT_EQ(run({.command = "sweep", .axis = "temperature", .eta = 0.6, .svg = true}), kExitOk);
  const std::string csv = slurp(dir_ / "sweep_temperature.csv");
  EXPECT_EQ(csv.rfind("axis_name,axis_value,P_e,dPe_dT,F_Q,f,omega_eff,gamma\n", 0), 0u);
  EXPECT_TRUE(fs::exists(dir_ / "sweep_temperature.svg"));
  EXPECT_NE(out_.str().find("sweep temperature"), std::string::npos);

  ASSERT_EQ(run({.command = "sweep", .axis = "temperature", .eta = 0.6}), kExitOk);
  EXPECT_EQ(slurp(dir_ / "sweep_temperature.csv"), csv);
}

TEST_F(CliTest, SweepEveryAxis) {
  for (const char* axis : {"temperature", "coupling", "cutoff", "drive"}) {
    ASSERT_EQ(run({.command = "sweep", .axis = axis}), kExitOk) << axis;
    EXPECT_TRUE(fs::exists(dir_ / (std::string("sweep_") + axis + ".csv")));
  }
  EXPECT_EQ(run({.command = "sweep", .axis = "pressure"}), kExitDomain);
}

TEST_F(CliTest, HeatmapIsByteIdenticalAcrossThreadCounts) {
  const fs::path one = dir_ / "one", eight = dir_ / "eight";
  ::setenv("PHONON_THERMO_THREADS", "1", 1);
  ASSERT_EQ(run({.command = "heatmap", .out = one.string(), .svg = true}), kExitOk);
  ::setenv("PHONON_THERMO_THREADS", "8", 1);
  ASSERT_EQ(run({.command = "heatmap", .out = eight.string()}), kExitOk);
  ::unsetenv("PHONON_THERMO_THREADS");
  const std::string a = slurp(one / "heatmap.csv");
  EXPECT_EQ(a, slurp(eight / "heatmap.csv"));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 40001);
  EXPECT_TRUE(fs::exists(one / "heatmap.svg"));
  EXPECT_NE(out_.str().find("(interior)"), std::string::npos);
}

TEST_F(CliTest, BadThreadEnvironmentIsConfigError) {
  ::setenv("PHONON_THERMO_THREADS", "-2", 1);
  EXPECT_EQ(run({.command = "heatmap"}), kExitDomain);
  ::unsetenv("PHONON_THERMO_THREADS");
}

TEST_F(CliTest, Optimize) {
  ASSERT_EQ(run({.command = "optimize", .axis = "coupling"}), kExitOk);
  const std::string csv = slurp(dir_ / "optimize_coupling.csv");
  EXPECT_EQ(csv.rfind("parameter,T,lo,hi,argmax,F_Q_max,iterations,interior\ncoupling,", 0), 0u);
  EXPECT_NE(out_.str().find("interior"), std::string::npos);
  EXPECT_EQ(run({.command = "optimize", .axis = "cutoff", .temp = 2.0}), kExitOk);
  EXPECT_EQ(run({.command = "optimize", .axis = "temperature"}), kExitUsage);
}

TEST_F(CliTest, OptimizeFlatProfileExitsFour) {
  EXPECT_EQ(run({.command = "optimize", .axis = "cutoff", .eta = 0.0}), kExitNonConvergence);
}

TEST_F(CliTest, LimitsReportsThreeBlocks) {
  ASSERT_EQ(run({.command = "limits"}), kExitOk);
  const std::string text = out_.str();
  EXPECT_NE(text.find("[PASS] weak-coupling"), std::string::npos);
  EXPECT_NE(text.find("[PASS] strong-coupling"), std::string::npos);
  EXPECT_NE(text.find("[PASS] low-temperature"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "limits.csv"));
}

TEST_F(CliTest, ValidateDefaults) {
  ASSERT_EQ(run({.command = "validate"}), kExitOk) << out_.str();
  const std::string text = out_.str();
  EXPECT_NE(text.find("[PASS] (a) derivative"), std::string::npos);
  EXPECT_NE(text.find("[PASS] (b) ode"), std::string::npos);
  EXPECT_NE(text.find("rederived = "), std::string::npos);
  EXPECT_NE(text.find("[PASS] (c) qfi identity"), std::string::npos);
  EXPECT_NE(text.find("[PASS] (d) dressing monotonicity: 0 violations"), std::string::npos);
}

TEST_F(CliTest, ValidateWithZeroCouplingRow) {
  const std::string cfg = write_config("zero.json", R"({"grids": {
      "validate_coupling": {"start": 0.0, "stop": 3.0, "count": 20},
      "ode_coupling": {"start": 0.0, "stop": 1.0, "count": 10}}})");
  ASSERT_EQ(run({.command = "validate", .config_path = cfg}), kExitOk) << out_.str();
  EXPECT_NE(out_.str().find("skipped (gamma = 0)"), std::string::npos);

  const RunConfig rc = parse_config(slurp(cfg));
  for (double T : rc.grids.validate_temperature.values()) {
    const BathConfig uncoupled = rc.bath.with_eta(0.0);
    EXPECT_EQ(steady_population_dT_analytic(rc.probe, uncoupled, T, rc.variant), 0.0);
    EXPECT_EQ(steady_population_dT_richardson(rc.probe, uncoupled, T, 1e-4 * T, rc.variant), 0.0);
  }
}

TEST_F(CliTest, UnknownCommandIsUsageError) {
  EXPECT_EQ(run({.command = "frobnicate"}), kExitUsage);
}
