#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "config.hpp"
#include "io.hpp"

namespace fs = std::filesystem;
using namespace tbgcli;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("tbg_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tbg-cli");
  return run(args);
}

}  // namespace

TEST(Csv, FormatAndQuoting) {
  EXPECT_EQ(format_cell(Cell{0.1}), "0.10000000000000001");
  EXPECT_EQ(format_cell(Cell{1.0}), "1");
  EXPECT_EQ(format_cell(Cell{-3LL}), "-3");
  EXPECT_EQ(format_cell(Cell{std::string("a,b")}), "\"a,b\"");
  EXPECT_EQ(format_cell(Cell{std::string("say \"x\"")}), "\"say \"\"x\"\"\"");
  CsvTable t({"x", "y"});
  t.add({1.5, 2LL});
  EXPECT_EQ(t.str(), "x,y\r\n1.5,2\r\n");
  EXPECT_THROW(t.add({1.0}), std::logic_error);
}

TEST(Csv, RoundTripsDoublesExactly) {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-310, 0.5856635583895583}) {
    std::string s = format_cell(Cell{x});
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), x);
  }
}

TEST(Config, StrictKeys) {
  json base = default_config("magic");
  EXPECT_THROW(merge_strict(base, json{{"bogus", 1}}), ConfigError);
  EXPECT_THROW(merge_strict(base, json{{"task", {{"alpha_maxx", 1.0}}}}), ConfigError);
  EXPECT_THROW(merge_strict(base, json{{"task", {{"alpha_max", "big"}}}}), ConfigError);
  EXPECT_THROW(merge_strict(base, json{{"disorder", {{"lambda", 0.1}}}}), ConfigError);
  EXPECT_THROW(merge_strict(base, json{{"model", {{"potential", "other"}}}}), ConfigError);
  json ok = merge_strict(base, json{{"task", {{"alpha_max", 2}}}, {"model", {{"alpha", 0.5}}}});
  EXPECT_EQ(ok["task"]["alpha_max"].get<double>(), 2.0);
  EXPECT_EQ(ok["model"]["alpha"], json::array({0.5, 0.0}));
  EXPECT_THROW(default_config("nope"), ConfigError);
}

TEST(Config, IntegerSlotsRejectFractions) {
  json base = default_config("det4");
  EXPECT_THROW(merge_strict(base, json{{"task", {{"n_terms", 4.5}}}}), ConfigError);
  EXPECT_EQ(merge_strict(base, json{{"task", {{"n_terms", 30.0}}}})["task"]["n_terms"].get<int>(), 30);
}

TEST(Config, Overrides) {
  json c = default_config("wegner");
  apply_override(c, "/numerics/L_list", "3,4");
  apply_override(c, "/disorder/lambda", "0.2");
  apply_override(c, "/disorder/kind", "case1");
  EXPECT_EQ(c["numerics"]["L_list"], json::array({3, 4}));
  EXPECT_EQ(c["disorder"]["lambda"].get<double>(), 0.2);
  EXPECT_THROW(apply_override(c, "/task/n_real", "many"), ConfigError);
  EXPECT_THROW(apply_override(c, "/task/zzz", "1"), ConfigError);
  EXPECT_THROW(disorder_from(merge_strict(c, json{{"disorder", {{"kind", "case3"}}}})), ConfigError);
}

TEST(Config, CustomPotentialValidated) {
  json c = default_config("magic");
  json pot = {{"modes", {{{"momentum", {0.0, 1.0}}, {"coeff", {1.0, 0.0}}}}}};
  EXPECT_NO_THROW(potential_from(merge_strict(c, json{{"model", {{"potential", pot}}}})));
  json bad = {{"modes", {{{"momentum", {0.1, 0.3}}, {"coeff", {1.0, 0.0}}}}}};
  EXPECT_THROW(potential_from(merge_strict(c, json{{"model", {{"potential", bad}}}})), ConfigError);
}

TEST(Cli, MagicWritesCsvAndManifest) {
  auto dir = scratch("magic");
  ASSERT_EQ(cli({"magic", "--alpha-max", "1.0", "--out", dir.string()}), 0);
  std::string csv = slurp(dir / "magic_alphas.csv");
  EXPECT_NE(csv.find("0.585663558"), std::string::npos);
  json m = json::parse(slurp(dir / "magic.manifest.json"));
  EXPECT_EQ(m["subcommand"], "magic");
  EXPECT_EQ(m["outputs"][0]["file"], "magic_alphas.csv");
  EXPECT_EQ(m["config"]["task"]["alpha_max"].get<double>(), 1.0);
  EXPECT_TRUE(m.contains("wall_time_s"));
  // every file in the directory is listed by the manifest
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string f = e.path().filename().string();
    if (f == "magic.manifest.json") continue;
    bool listed = false;
    for (const auto& o : m["outputs"]) listed |= o["file"] == f;
    EXPECT_TRUE(listed) << f;
  }
  fs::remove_all(dir);
}

TEST(Cli, ManifestRerunIsByteIdentical) {
  auto a = scratch("rerun_a"), b = scratch("rerun_b");
  ASSERT_EQ(cli({"perturb-scatter", "--n-samples", "3", "--cutoff", "5", "--seed", "42", "--out", a.string()}), 0);
  ASSERT_EQ(cli({"perturb-scatter", "--config", (a / "perturb-scatter.manifest.json").string(), "--out", b.string()}), 0);
  EXPECT_EQ(slurp(a / "perturb-scatter_scatter.csv"), slurp(b / "perturb-scatter_scatter.csv"));
  ASSERT_EQ(cli({"perturb-scatter", "--n-samples", "3", "--cutoff", "5", "--seed", "43", "--out", b.string()}), 0);
  EXPECT_NE(slurp(a / "perturb-scatter_scatter.csv"), slurp(b / "perturb-scatter_scatter.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, FailuresLeaveNoOutputs) {
  auto dir = scratch("fail");
  // the trace region of a 4-torus is empty
  EXPECT_NE(cli({"chern", "--L-list", "4", "--out", dir.string()}), 0);
  EXPECT_TRUE(!fs::exists(dir) || fs::is_empty(dir));
  EXPECT_EQ(cli({"magic", "--alpha-max", "oops", "--out", dir.string()}), 2);
  EXPECT_EQ(cli({"wannier-moment", "--alpha", "0.7", "--L-list", "3", "--out", dir.string()}), 3);
  EXPECT_TRUE(!fs::exists(dir) || fs::is_empty(dir));
  auto cfg = scratch("cfg.json");
  std::ofstream(cfg) << R"({"task": {"alpha_max": 1.0, "extra": 2}})";
  EXPECT_EQ(cli({"magic", "--config", cfg.string(), "--out", dir.string()}), 2);
  fs::remove(cfg);
  fs::remove_all(dir);
}
