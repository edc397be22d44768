#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mconc/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mconc::cli;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("mconc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "mconc");
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::vector<std::vector<std::string>> csv(const std::string& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      rows.push_back(cells);
    }
    return rows;
  }

  void write(const std::string& name, const json& j) { std::ofstream(path(name)) << j.dump(); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST(CliHelpers, FormatAndParse) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(parse_range("1..6"), (std::pair<long, long>{1, 6}));
  EXPECT_EQ(parse_range("3"), (std::pair<long, long>{3, 3}));
  EXPECT_DOUBLE_EQ(tolerance_for_profile("default"), 1e-8);
  EXPECT_DOUBLE_EQ(tolerance_for_profile("strict"), 1e-10);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli({}), kUsage);
  EXPECT_EQ(cli({"frobnicate"}), kUsage);
  EXPECT_EQ(cli({"verify-traces", "--trials", "0", "--out", path("v.json")}), kUsage);
  EXPECT_EQ(cli({"bound", "--sigma2", "-1", "--out", path("b.csv")}), kUsage);
  EXPECT_EQ(cli({"--tol-profile", "sloppy", "bound", "--out", path("b.csv")}), kUsage);
  write("bad.json", {{"no_such_key", 1}});
  EXPECT_EQ(cli({"--config", path("bad.json"), "bound", "--out", path("b.csv")}), kUsage);
  EXPECT_EQ(cli({"--version"}), kOk);
  EXPECT_NE(out_.str().find(kVersion), std::string::npos);
}

TEST_F(CliTest, BoundRows) {
  ASSERT_EQ(cli({"bound", "--sigma2", "1", "--dim", "2", "--t", "0", "2", "--out", path("b.csv")}), kOk);
  const auto rows = csv(path("b.csv"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], "t");
  EXPECT_EQ(rows[0][5], "tropp");
  // t = 0: every bound equals d, clamped to 1.
  EXPECT_EQ(rows[1][1], "1");
  EXPECT_EQ(rows[1][3], "1");
  EXPECT_EQ(rows[1][5], "1");
  EXPECT_NEAR(std::stod(rows[2][1]), 0.0366313, 1e-7);
  EXPECT_EQ(rows[2][2], "NA");
  EXPECT_NEAR(std::stod(rows[2][3]), 0.735759, 1e-6);
  EXPECT_EQ(rows[2][5], "1");
  EXPECT_FALSE(rows[2][6].empty());
  EXPECT_TRUE(fs::exists(path("b.csv.manifest.json")));
}

TEST_F(CliTest, BoundWithDependency) {
  write("dep.json", {{"D", {{0.0, 0.5}, {0.5, 0.0}}}});
  ASSERT_EQ(cli({"bound", "--t", "2", "--dependency", path("dep.json"), "--out", path("b.csv")}), kOk);
  const auto rows = csv(path("b.csv"));
  EXPECT_NEAR(std::stod(rows[1][2]), 0.270671, 1e-6);
  write("strong.json", {{"D", {{0.0, 1.0}, {0.2, 0.0}}}});
  EXPECT_EQ(cli({"bound", "--dependency", path("strong.json"), "--out", path("c.csv")}), kUsage);
  EXPECT_NE(err_.str().find("Dobrushin"), std::string::npos);
}

TEST_F(CliTest, DobrushinIsing) {
  ASSERT_EQ(cli({"dobrushin", "--runs", "5000", "--out", path("d.json")}), kOk);
  const json d = json::parse(slurp(path("d.json")));
  EXPECT_NEAR(d["D"][0][1].get<double>(), 0.244919, 1e-6);
  EXPECT_NEAR(d["norms"]["norm1"].get<double>(), 0.244919, 1e-6);
  EXPECT_NEAR(d["c"].get<double>(), 1.324361, 1e-6);
  EXPECT_TRUE(d["coupling"]["holds"].get<bool>());
}

TEST_F(CliTest, DobrushinIndependentModel) {
  write("cfg.json", {{"model", {{"kind", "rademacher"}, {"n", 3}}}, {"coupling_runs", 0}});
  ASSERT_EQ(cli({"--config", path("cfg.json"), "dobrushin", "--out", path("d.json")}), kOk);
  const json d = json::parse(slurp(path("d.json")));
  for (const auto& row : d["D"]) {
    for (const auto& v : row) EXPECT_EQ(v.get<double>(), 0.0);
  }
  EXPECT_EQ(d["c"].get<double>(), 1.0);
}

TEST_F(CliTest, McTailDominated) {
  ASSERT_EQ(cli({"mc-tail", "-N", "5000", "--pilot", "1000", "--out", path("m.csv")}), kOk);
  const auto rows = csv(path("m.csv"));
  ASSERT_EQ(rows.size(), 14u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][6], "1");
}

TEST_F(CliTest, VerifyTracesSmall) {
  ASSERT_EQ(cli({"verify-traces", "--trials", "120", "--dims", "1..3", "--out", path("v.json")}), kOk);
  const json v = json::parse(slurp(path("v.json")));
  EXPECT_EQ(v["total_violations"].get<int>(), 0);
  EXPECT_EQ(v["inequalities"].size(), 8u);
  EXPECT_EQ(cli({"verify-traces", "--ineq", "expconj", "--out", path("w.json")}), kUsage);
}

TEST_F(CliTest, ConjectureWritesWitness) {
  ASSERT_EQ(cli({"conjecture", "--budget", "50", "--descent-budget", "20", "--out", path("c.json")}), kOk);
  const json c = json::parse(slurp(path("c.json")));
  EXPECT_EQ(c["results"][0]["verdict"], "supported");
  EXPECT_TRUE(fs::exists(path("c.json.witnesses/expconj_exp.json")));
}

TEST_F(CliTest, ReportDetectsTampering) {
  ASSERT_EQ(cli({"bound", "--out", path("b.csv")}), kOk);
  ASSERT_EQ(cli({"report", path("b.csv.manifest.json"), "--out", path("r.csv")}), kOk);
  std::ofstream(path("b.csv"), std::ios::app) << "tampered\n";
  EXPECT_EQ(cli({"report", path("b.csv.manifest.json"), "--out", path("r2.csv")}), kViolation);
}

TEST_F(CliTest, DeterministicOutputs) {
  const std::vector<std::vector<std::string>> cmds = {
      {"bound"},
      {"mc-tail", "-N", "3000", "--pilot", "500"},
      {"dobrushin", "--runs", "2000"},
      {"verify-traces", "--trials", "60", "--dims", "1..2"},
      {"conjecture", "--ineq", "fconj", "--budget", "30", "--descent-budget", "10"},
  };
  int i = 0;
  for (const auto& cmd : cmds) {
    std::vector<std::string> a = {"--seed", "9"}, b = {"--seed", "9", "--threads", "2"};
    a.insert(a.end(), cmd.begin(), cmd.end());
    b.insert(b.end(), cmd.begin(), cmd.end());
    const std::string pa = path("a" + std::to_string(i)), pb = path("b" + std::to_string(i));
    a.insert(a.end(), {"--out", pa});
    b.insert(b.end(), {"--out", pb});
    ASSERT_LE(cli(a), kViolation) << err_.str();
    ASSERT_LE(cli(b), kViolation) << err_.str();
    EXPECT_EQ(slurp(pa), slurp(pb)) << cmd[0];
    EXPECT_FALSE(slurp(pa).empty());
    ++i;
  }
}
