#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kCli = UHWAVE_CLI_PATH;
const fs::path kScenarios = UHWAVE_SCENARIO_DIR;

struct CliRun {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("uhwave_cli_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliRun run(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = kCli.string() + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SynthesizeNoPointsWritesHeaderOnly) {
  const auto cfg = write("empty.ini", "[scenario]\nname = \"empty\"\n[signature]\nd = 2\nn = 1\nm = 1.0\n"
                                      "[density]\nfamily = \"gaussian\"\ncenter = [0.0, 0.0]\n");
  const CliRun r = run("synthesize --config " + cfg.string() + " --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "empty_samples.csv"), "x1,x2,t1,re_u,im_u\n");
}

TEST_F(CliTest, SynthesizeFormatsSeventeenDigits) {
  const auto cfg = write("pts.ini", "[scenario]\nname = \"pts\"\n[signature]\nd = 1\nn = 1\nm = 1.0\n"
                                    "[density]\nfamily = \"gaussian\"\ncenter = [0.0]\nwidth = 0.7\n"
                                    "[sampling]\npoints = [{\"x\": [0.0], \"t\": [0.0]}, {\"x\": [0.5], \"t\": [1.0]}]\n");
  const CliRun r = run("synthesize --config " + cfg.string() + " --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(dir_ / "pts_samples.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "x1,t1,re_u,im_u");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      const auto mant = cell.substr(0, cell.find('e'));
      const auto digits = std::count_if(mant.begin(), mant.end(), [](char c) { return std::isdigit(c); });
      EXPECT_EQ(digits, 17) << cell;
    }
  }
  EXPECT_EQ(rows, 2);
}

TEST_F(CliTest, AsymptoticsZeroDataGivesZeroTable) {
  const auto cfg = write("zero.ini", "[scenario]\nname = \"zero\"\n[signature]\nd = 1\nn = 1\nm = 1.0\n"
                                     "[rays]\ntimelike = [{\"theta\": [0.3], \"omega\": [1.0]}]\n");
  const CliRun r = run("asymptotics --config " + cfg.string() + " --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(dir_ / "zero_asymptotics.json"));
  const auto& ray = report["rays"][0];
  EXPECT_EQ(ray["u_plus"][0], 0.0);
  EXPECT_EQ(ray["u_minus"][1], 0.0);
  EXPECT_TRUE(ray["fit"]["degenerate"].get<bool>());
  EXPECT_DOUBLE_EQ(report["exponent_target"].get<double>(), -1.5);
  std::istringstream csv(slurp(dir_ / "zero_amplitudes.csv"));
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_NE(row.find("0.0000000000000000e+00"), std::string::npos);
}

TEST_F(CliTest, AsymptoticsReportsLeadingTerm) {
  const CliRun r = run("asymptotics --config " + (kScenarios / "uh_d1n2_timelike.ini").string() + " --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(dir_ / "uh_d1n2_timelike_asymptotics.json"));
  const auto& ray = report["rays"][0];
  EXPECT_LT(ray["relative_error"].get<double>(), 0.05);
  EXPECT_LT(ray["fit"]["slope"].get<double>(), -2.0 + 0.4);
}

TEST_F(CliTest, InvertWritesDensityAndReport) {
  const CliRun r = run("invert --config " + (kScenarios / "kg_d1n1_inverse.ini").string() + " --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(dir_ / "kg_d1n1_inverse_invert.json"));
  EXPECT_LE(report["roundtrip_deviation"].get<double>(), 1e-12);
  EXPECT_EQ(report["reconstructed_other"].size(), 100u);
  std::istringstream csv(slurp(dir_ / "kg_d1n1_inverse_density.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "xi1,sigma1,re_A,im_A,re_a,im_a");
}

TEST_F(CliTest, VerifyPassesOnShippedScenario) {
  const CliRun r = run("verify --config " + (kScenarios / "kg_d1n1_cauchy.ini").string() + " --out " + dir_.string());
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "kg_d1n1_cauchy_verify.json"));
}

TEST_F(CliTest, VerifyFailsWithImpossibleTolerance) {
  const auto cfg = write("strict.ini", slurp(kScenarios / "kg_d1n1_cauchy.ini") + "\n[tolerances]\ncauchy_value = 1e-30\n");
  const CliRun r = run("verify --config " + cfg.string() + " --out " + dir_.string());
  EXPECT_EQ(r.code, 1) << r.out << r.err;
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST_F(CliTest, ConfigErrorNamesTheKey) {
  const auto cfg = write("bad.ini", "[signature]\nd = 1\nn = 1\nm = 1.0\nmass = 2.0\n");
  const CliRun r = run("synthesize --config " + cfg.string() + " --out " + dir_.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("signature.mass"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "scenario_samples.csv"));
}

TEST_F(CliTest, MissingConfigAndBadFlags) {
  EXPECT_EQ(run("synthesize --config " + (dir_ / "nope.ini").string()).code, 2);
  EXPECT_EQ(run("synthesize").code, 2);
  EXPECT_EQ(run("frobnicate --config x").code, 2);
  EXPECT_EQ(run("synthesize --config x --resolution-scale -1").code, 2);
}

TEST_F(CliTest, VerifyWithoutDataIsConfigError) {
  const auto cfg = write("nodata.ini", "[signature]\nd = 1\nn = 1\nm = 1.0\n");
  EXPECT_EQ(run("verify --config " + cfg.string() + " --out " + dir_.string()).code, 2);
}
