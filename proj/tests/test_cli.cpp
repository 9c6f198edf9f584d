#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "faraday/errors.hpp"

using namespace faraday;
using namespace faraday::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("faraday_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

int run_command(const std::string& command, const std::string& text, const fs::path& out_dir, std::string* err = nullptr) {
  CliConfig c = parse_config(text);
  c.command = command;
  c.output = out_dir.string();
  std::ostringstream out, errs;
  const int code = dispatch(c, out, errs);
  if (err) *err = errs.str();
  return code;
}

const char* kSmallSweep =
    R"({"sweep":{"amps":[0,0.2,0.5],"omegas":[2,4,6],"k_per_axis":1,"nz":9,"steps_per_period":40}})";

}  // namespace

TEST(ParseConfig, EmptyDocumentGivesDefaults) {
  const CliConfig c = parse_config("{}");
  EXPECT_EQ(c.params.sigma, 1.0);
  EXPECT_EQ(c.params.g, 1.0);
  EXPECT_EQ(c.params.mu, 1.0);
  EXPECT_EQ(c.params.b, 1.0);
  EXPECT_EQ(c.params.L1, 1.0);
  EXPECT_EQ(c.params.L2, 1.0);
  for (double s : {0.0, 0.1, 0.37}) EXPECT_NEAR(c.params.profile.value(s), std::cos(2 * std::numbers::pi * s), 1e-15);
  EXPECT_TRUE(c.command.empty());
}

TEST(ParseConfig, ErrorsArePathQualified) {
  EXPECT_NE(config_error(R"({"params":{"g":-1}})").find("params.g"), std::string::npos);
  EXPECT_NE(config_error(R"({"params":{"gg":1}})").find("params.gg"), std::string::npos);
  EXPECT_NE(config_error(R"({"grid":{"nz":"x"}})").find("grid.nz"), std::string::npos);
  EXPECT_NE(config_error(R"({"run":{"initial":[{"target":"w"}]}})").find("run.initial[0].target"), std::string::npos);
  EXPECT_NE(config_error(R"({"sweep":{"amps":[0,"a"]}})").find("sweep.amps[1]"), std::string::npos);
  EXPECT_NE(config_error(R"({"extra":1})").find("extra"), std::string::npos);
  EXPECT_FALSE(config_error("{").empty());
}

TEST(ParseConfig, CosineProfileWithPhase) {
  const CliConfig c = parse_config(R"({"profile":{"type":"cosine","delta":0.5}})");
  for (double s : {0.0, 0.2, 0.7}) {
    EXPECT_NEAR(c.params.profile.value(s), std::cos(2 * std::numbers::pi * s - 0.5), 1e-15);
  }
}

TEST(ParseConfig, ExpandedFormRoundTrips) {
  const CliConfig c = parse_config(
      R"({"params":{"amp":0.01,"omega":3},"profile":{"type":"cosine","delta":1},"run":{"initial":[{"target":"u1","m1":1,"m2":1,"cos":0.1}]},"sweep":{"amps":{"min":0,"max":1,"count":5}},"linstab":{"k":[[1,2]]},"seed":9})");
  EXPECT_EQ(c.sweep.amps.size(), 5u);
  const CliConfig d = parse_config(c.to_json().dump());
  EXPECT_EQ(c.to_json(), d.to_json());
}

TEST(Dispatch, SweepWritesRowsAndManifest) {
  const fs::path dir = scratch("sweep");
  ASSERT_EQ(run_command("sweep", kSmallSweep, dir), 0);
  const std::string csv = slurp(dir / "sweep.csv");
  EXPECT_EQ(count_lines(csv), 10u);  // header plus 3 x 3 points
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["status"], "ok");
  EXPECT_EQ(manifest["command"], "sweep");
  // The manifest re-creates the job.
  const CliConfig again = parse_config(manifest["config"].dump());
  EXPECT_EQ(again.sweep.omegas.size(), 3u);
}

TEST(Dispatch, SweepIsDeterministic) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  ASSERT_EQ(run_command("sweep", kSmallSweep, a), 0);
  ASSERT_EQ(run_command("sweep", kSmallSweep, b), 0);
  EXPECT_EQ(slurp(a / "sweep.csv"), slurp(b / "sweep.csv"));
  EXPECT_EQ(slurp(a / "sweep_by_k.csv"), slurp(b / "sweep_by_k.csv"));
}

TEST(Dispatch, SeededVerificationIsDeterministic) {
  const std::string cfg = R"({"grid":{"n1":8,"n2":8,"nz":9},"seed":42,"verify":{"trials":2}})";
  for (const char* cmd : {"extend", "geometry-check", "elliptic-verify"}) {
    const fs::path a = scratch(std::string(cmd) + "_a"), b = scratch(std::string(cmd) + "_b");
    ASSERT_EQ(run_command(cmd, cfg, a), 0) << cmd;
    ASSERT_EQ(run_command(cmd, cfg, b), 0) << cmd;
    for (const auto& e : fs::directory_iterator(a)) {
      if (e.path().extension() == ".csv") EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << cmd;
    }
  }
  const fs::path d = scratch("elliptic_residual");
  ASSERT_EQ(run_command("elliptic-verify", cfg, d), 0);
  const auto manifest = nlohmann::json::parse(slurp(d / "manifest.json"));
  EXPECT_LT(manifest["summary"]["max_residual"].get<double>(), 1e-8);
  EXPECT_EQ(manifest["seed"], 42);
}

TEST(Dispatch, DegenerateSimulationExitsThree) {
  const fs::path dir = scratch("degenerate");
  std::string err;
  const int code = run_command(
      "simulate", R"({"grid":{"n1":8,"n2":8,"nz":9},"run":{"initial":[{"target":"eta","m1":1,"cos":0.5}]}})", dir,
      &err);
  EXPECT_EQ(code, 3);
  EXPECT_NE(err.find("flattening degenerate"), std::string::npos);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["exit_code"], 3);
}

TEST(Dispatch, SimulateThenVerifyAndFit) {
  const fs::path dir = scratch("simulate");
  const std::string cfg =
      R"({"grid":{"n1":8,"n2":8,"nz":9},"run":{"dt":0.01,"t_end":0.3,"output_stride":2,)"
      R"("initial":[{"target":"eta","m1":1,"cos":0.001},{"target":"u1","m1":0,"m2":1,"cos":0.001}]}})";
  ASSERT_EQ(run_command("simulate", cfg, dir), 0);
  EXPECT_TRUE(fs::exists(dir / "diagnostics.csv"));
  EXPECT_TRUE(fs::exists(dir / "snapshots" / "000000_eta.bin"));

  const fs::path ver = scratch("verify");
  const std::string vcfg = R"({"verify_ed":{"trajectory":")" + dir.string() + R"("}})";
  ASSERT_EQ(run_command("verify-ed", vcfg, ver), 0);
  // 16 snapshots give 12 five-point windows.
  EXPECT_EQ(count_lines(slurp(ver / "verify_ed.csv")), 13u);

  const fs::path fit = scratch("fit");
  const std::string fcfg = R"({"fit":{"input":")" + (dir / "diagnostics.csv").string() + R"("}})";
  ASSERT_EQ(run_command("fit", fcfg, fit), 0);
  const auto result = nlohmann::json::parse(slurp(fit / "fit.json"));
  EXPECT_GT(result["rate"].get<double>(), 0.0);
}

TEST(Dispatch, FitOnMissingInputIsValidationFailure) {
  const fs::path dir = scratch("fit_missing");
  EXPECT_EQ(run_command("fit", R"({"fit":{"input":"/nonexistent/diag.csv"}})", dir), 2);
}

TEST(Main, FlagsOverrideConfig) {
  const fs::path dir = scratch("main");
  fs::create_directories(dir);
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << kSmallSweep;
  const std::string out = (dir / "out").string();
  const std::string cfg_s = cfg.string();
  std::vector<std::string> args = {"faraday", "sweep", "--config", cfg_s, "--output", out, "--threads", "1", "--seed", "5"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  EXPECT_EQ(faraday::cli::main(static_cast<int>(argv.size()), argv.data()), 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 5);
  EXPECT_EQ(manifest["threads"], 1);

  std::vector<std::string> bad = {"faraday", "nosuch"};
  std::vector<char*> bargv;
  for (auto& a : bad) bargv.push_back(a.data());
  EXPECT_EQ(faraday::cli::main(static_cast<int>(bargv.size()), bargv.data()), 2);
}
