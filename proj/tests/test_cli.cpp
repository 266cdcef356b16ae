#include "hypdyn/cli.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int exit_code = -1;
  std::string out;
};

Invocation run(const std::string& args) {
  const std::string cmd = std::string(HYPDYN_CLI_PATH) + " " + args + " 2>/dev/null";
  Invocation r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hypdyn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const json& content) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << content.dump();
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

const json kCat = {{"type", "torus"}, {"matrix", {{2, 1}, {1, 1}}}};

}  // namespace

TEST_F(CliTest, PinchOnCatMap) {
  const Invocation r = run("pinch --system " + write("cat.json", kCat));
  ASSERT_EQ(r.exit_code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["command"], "pinch");
  const double margin = j["results"]["pinched_margin"];
  EXPECT_GE(margin, 0.7);
  EXPECT_LE(margin, 1.15);
  EXPECT_TRUE(j["results"]["pinched"].get<bool>());
  EXPECT_EQ(j["tool_version"], hypdyn::kToolVersion);
}

TEST_F(CliTest, MatherSpotValue) {
  const Invocation r = run("mather --bounds 0.3,0.4,2,3");
  ASSERT_EQ(r.exit_code, 0);
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["results"]["brin1"].get<bool>());
  EXPECT_NEAR(j["results"]["pinched_sum"].get<double>(), 1.3919, 1e-3);
}

TEST_F(CliTest, EmptyConfigListsMissingKeys) {
  const Invocation r = run("pinch --config " + write("empty.json", json::object()));
  EXPECT_EQ(r.exit_code, 2);
  const json j = json::parse(r.out);
  EXPECT_NE(j["error"]["message"].get<std::string>().find("missing keys: system"), std::string::npos);
}

TEST_F(CliTest, MalformedConfigIsAValidationError) {
  std::ofstream(path("bad.json")) << "{ not json";
  EXPECT_EQ(run("pinch --config " + path("bad.json")).exit_code, 2);
}

TEST_F(CliTest, UnknownCommand) { EXPECT_EQ(run("frobnicate").exit_code, 2); }

TEST_F(CliTest, NumericFailureExitsThree) {
  const Invocation r = run("limits --matrix \"1,1;0,1\"");
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_EQ(json::parse(r.out)["error"]["kind"], "NotHyperbolic");
}

TEST_F(CliTest, SelfcheckPasses) {
  const Invocation r = run("selfcheck");
  ASSERT_EQ(r.exit_code, 0);
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["results"]["passed"].get<bool>());
  for (const auto& p : j["results"]["properties"]) EXPECT_TRUE(p["passed"].get<bool>()) << p["name"];
}

TEST_F(CliTest, SelfcheckCatchesFlippedBracket) {
  const Invocation r = run("selfcheck --inject-fault");
  EXPECT_EQ(r.exit_code, 3);
  const json j = json::parse(r.out);
  bool bracket_failed = false;
  for (const auto& p : j["results"]["properties"])
    if (!p["passed"].get<bool>() && p["name"].get<std::string>().rfind("models.bracket", 0) == 0)
      bracket_failed = true;
  EXPECT_TRUE(bracket_failed);
}

TEST_F(CliTest, SelfcheckFilter) {
  const Invocation r = run("selfcheck --filter logscale");
  ASSERT_EQ(r.exit_code, 0);
  const json props = json::parse(r.out)["results"]["properties"];
  ASSERT_FALSE(props.empty());
  for (const auto& p : props) EXPECT_EQ(p["name"].get<std::string>().rfind("logscale.", 0), 0u);
}

TEST_F(CliTest, ResultsAreDeterministic) {
  const std::string sys = write("cat.json", kCat);
  for (const std::string& args :
       {"metric --system " + sys + " --window 0.05 --spacing 0.002 --seed 5",
        std::string("hypgraph --matrix \"2,1;1,1\" --levels 2 --rho 8 --quadruples 500 --seed 9")}) {
    json a = json::parse(run(args).out), b = json::parse(run(args).out);
    a.erase("timing");
    b.erase("timing");
    EXPECT_EQ(a.dump(), b.dump()) << args;
  }
}

TEST_F(CliTest, ExponentCsv) {
  const std::string csv = path("dn.csv");
  const Invocation r = run("exponents --system " + write("cat.json", kCat) + " --side stable --csv " + csv);
  ASSERT_EQ(r.exit_code, 0);
  const std::string text = slurp(csv);
  EXPECT_EQ(text.rfind("pair_id,side,n,dn\n", 0), 0u);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_GT(std::count(text.begin(), text.end(), '\n'), 20);
}

TEST_F(CliTest, HypgraphEdgeList) {
  const std::string csv = path("edges.csv");
  const Invocation r = run("hypgraph --matrix \"2,1;1,1\" --levels 1 --rho 4 --quadruples 100 --edges " + csv);
  ASSERT_EQ(r.exit_code, 0);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "u,v,u_level,v_level");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    int u, v, lu, lv;
    ASSERT_EQ(std::sscanf(line.c_str(), "%d,%d,%d,%d", &u, &v, &lu, &lv), 4);
    EXPECT_LE(std::abs(lu - lv), 1);
    ++rows;
  }
  EXPECT_GT(rows, 0u);
}

TEST_F(CliTest, OutFlagWritesReport) {
  const std::string out = path("report.json");
  const Invocation r = run("mather --bounds 0.5,0.5,3,3 --out " + out);
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_DOUBLE_EQ(json::parse(slurp(out))["results"]["pinched_sum"].get<double>(), 2.0);
}

TEST(CliLibrary, RoundNumbers) {
  const json in = {{"a", 0.1234567890123456}, {"b", {1.0 / 3.0, 7}},
                   {"c", std::numeric_limits<double>::infinity()}, {"d", -std::numeric_limits<double>::infinity()},
                   {"e", std::nan("")}, {"f", "text"}};
  const json out = hypdyn::round_numbers(in);
  EXPECT_EQ(out["a"].get<double>(), 0.123456789012);
  EXPECT_EQ(out["b"][0].get<double>(), 0.333333333333);
  EXPECT_EQ(out["b"][1], 7);
  EXPECT_EQ(out["c"], "inf");
  EXPECT_EQ(out["d"], "-inf");
  EXPECT_EQ(out["e"], "nan");
  EXPECT_EQ(out["f"], "text");
}

TEST(CliLibrary, ParseInlineValues) {
  EXPECT_EQ(hypdyn::parse_matrix("2,1;1,1"), json({{2.0, 1.0}, {1.0, 1.0}}));
  EXPECT_EQ(hypdyn::parse_list("0.3, 0.4,2,3"), (std::vector<double>{0.3, 0.4, 2.0, 3.0}));
}

TEST(CliLibrary, CommandSet) {
  const std::vector<std::string> expected = {"exponents", "connectivity", "pinch",  "metric",   "hypgraph",
                                             "limits",    "mather",       "codim1", "selfcheck"};
  auto names = hypdyn::command_names();
  std::sort(names.begin(), names.end());
  auto want = expected;
  std::sort(want.begin(), want.end());
  EXPECT_EQ(names, want);
}
