#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mdmp/cli.hpp"

using namespace mdmp;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"mdmp"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

// Value printed after a fixed-width label in the generate / inspect summary.
std::string field(const std::string& text, const std::string& label) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind(label, 0) == 0) {
      std::istringstream ls(line.substr(label.size()));
      std::string v;
      ls >> v;
      return v;
    }
  }
  return {};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) out.push_back(line);
  return out;
}

const std::string kConfigDir = MDMP_CONFIG_DIR;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mdmp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Small car graph, 2 x 2 tile.
  std::string small_car(const std::string& name = "car.mdmp") {
    const auto r = cli({"generate", "--config", kConfigDir + "/rs_tiled.ini", "--count", "1500", "--target", "1.6",
                        "-o", path(name)});
    EXPECT_EQ(r.code, 0) << r.err;
    return path(name);
  }

  // 10 m x 10 m free map centered on the origin.
  std::string free_map(const std::string& name = "free.pgm") {
    save_map(OccupancyGrid(40, 40, 0.25, {-5.0, -5.0}), path(name));
    return path(name);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenerateSummary) {
  const auto r = cli({"generate", "--config", kConfigDir + "/rs_tiled.ini", "--count", "1500", "--target", "1.6",
                      "-o", path("g.mdmp")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(field(r.out, "system"), "reeds_shepp");
  EXPECT_EQ(field(r.out, "seed"), "0");
  EXPECT_LE(std::stod(field(r.out, "dispersion")), 1.6);
  EXPECT_TRUE(fs::exists(path("g.mdmp")));
  EXPECT_TRUE(fs::exists(path("g.mdmp.json")) || fs::exists(sidecar_path(path("g.mdmp"))));
  const PrimitiveGraph g = load_graph(path("g.mdmp"));
  EXPECT_EQ(field(r.out, "vertices"), std::to_string(g.vertices.size()));
  EXPECT_EQ(field(r.out, "edges"), std::to_string(g.edges.size()));
}

TEST_F(CliTest, InfiniteTargetKeepsOneVertex) {
  const auto r = cli({"generate", "--set", "system.kind=\"double_integrator\"", "--set", "dispersion.target=inf",
                      "--count", "500", "-o", path("g.mdmp")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(field(r.out, "vertices"), "1");
  EXPECT_EQ(field(r.out, "system"), "double_integrator");
}

TEST_F(CliTest, GenerateIsReproducible) {
  const auto a = small_car("a.mdmp");
  const auto b = small_car("b.mdmp");
  EXPECT_EQ(slurp(a), slurp(b));
  const auto c = cli({"generate", "--config", kConfigDir + "/rs_tiled.ini", "--count", "1500", "--target", "1.6",
                      "--seed", "9", "-o", path("c.mdmp")});
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(field(c.out, "seed"), "9");
}

TEST_F(CliTest, ShippedCarConfigReachesTarget) {
  const auto r = cli({"generate", "--config", kConfigDir + "/rs_tiled.ini", "-o", path("g.mdmp")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(std::stod(field(r.out, "dispersion")), 1.05);
  EXPECT_EQ(field(r.out, "vertices"), "10");
}

TEST_F(CliTest, PlanStartEqualsGoal) {
  const auto g = small_car();
  const auto m = free_map();
  const auto r = cli({"plan", "--graph", g, "--map", m, "--start", "0,0,0", "--goal", "0,0,0", "-o", path("p.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(path("p.json")));
  EXPECT_EQ(j["status"], "success");
  EXPECT_NEAR(j["total_cost"].get<double>(), 0.0, 1e-12);
  EXPECT_EQ(j["collision_checks"], 1);
}

TEST_F(CliTest, PlanWritesResultAndSvg) {
  const auto g = small_car();
  const auto m = free_map();
  const auto r = cli({"plan", "--graph", g, "--map", m, "--start", "-3,-3,0", "--goal", "3,2,1.5", "-o",
                      path("p.json"), "--svg", path("p.svg"), "--seed", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("status success"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(path("p.json")));
  EXPECT_EQ(j["seed"], 5);
  ASSERT_FALSE(j["trajectories"].empty());
  const std::string svg = slurp(path("p.svg"));
  EXPECT_EQ(count(svg, "<path"), j["trajectories"].size());
  EXPECT_EQ(count(svg, "<polygon"), 2u);
  EXPECT_EQ(count(svg, "<rect class=\"obstacle\""), 0u);

  // Without -o the JSON goes to stdout.
  const auto s = cli({"plan", "--graph", g, "--map", m, "--start", "-3,-3,0", "--goal", "3,2,1.5"});
  ASSERT_EQ(s.code, 0);
  EXPECT_EQ(nlohmann::json::parse(s.out)["total_cost"], j["total_cost"]);
}

TEST_F(CliTest, PlanExitCodes) {
  const auto g = small_car();
  OccupancyGrid walled(40, 40, 0.25, {-5.0, -5.0});
  // Closed box around the goal.
  walled.fill_rect(1.0, 1.0, 4.0, 1.5, true);
  walled.fill_rect(1.0, 3.5, 4.0, 4.0, true);
  walled.fill_rect(1.0, 1.0, 1.5, 4.0, true);
  walled.fill_rect(3.5, 1.0, 4.0, 4.0, true);
  save_map(walled, path("walled.pgm"));
  const auto budget = cli({"plan", "--graph", g, "--map", path("walled.pgm"), "--start", "-3,-3,0", "--goal",
                           "2.5,2.5,0", "--max-checks", "300", "-o", path("p.json")});
  EXPECT_EQ(budget.code, 3) << budget.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(path("p.json")))["status"], "budget_exhausted");

  const auto missing =
      cli({"plan", "--graph", path("nope.mdmp"), "--map", free_map(), "--start", "0,0,0", "--goal", "0,0,0"});
  EXPECT_EQ(missing.code, 4);
  const auto bad_state = cli({"plan", "--graph", g, "--map", free_map(), "--start", "0,0", "--goal", "0,0,0"});
  EXPECT_EQ(bad_state.code, 1);
  EXPECT_NE(bad_state.err.find("3 comma-separated"), std::string::npos);
  const auto bad_heur =
      cli({"plan", "--graph", g, "--map", free_map(), "--start", "0,0,0", "--goal", "0,0,0", "--heuristic", "magic"});
  EXPECT_EQ(bad_heur.code, 1);
  const auto no_goal = cli({"plan", "--graph", g, "--map", free_map(), "--start", "0,0,0"});
  EXPECT_EQ(no_goal.code, 1);
}

TEST_F(CliTest, PlanNoPath) {
  const auto g = small_car();
  OccupancyGrid grid(40, 40, 0.25, {-5.0, -5.0});
  grid.fill_rect(1.0, 1.0, 4.0, 1.5, true);
  grid.fill_rect(1.0, 3.5, 4.0, 4.0, true);
  grid.fill_rect(1.0, 1.0, 1.5, 4.0, true);
  grid.fill_rect(3.5, 1.0, 4.0, 4.0, true);
  // Seal everything except a small pocket around the start.
  grid.fill_rect(-5.0, -5.0, 5.0, -4.0, true);
  grid.fill_rect(-5.0, -2.0, 5.0, -1.5, true);
  grid.fill_rect(-5.0, -5.0, -4.5, 5.0, true);
  grid.fill_rect(-2.0, -5.0, -1.5, -1.5, true);
  save_map(grid, path("sealed.pgm"));
  const auto r = cli({"plan", "--graph", g, "--map", path("sealed.pgm"), "--start", "-3,-3,0", "--goal", "2.5,2.5,0",
                      "-o", path("p.json")});
  EXPECT_EQ(r.code, 2) << r.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(path("p.json")))["status"], "no_path");
}

TEST_F(CliTest, InspectMatchesGraph) {
  const auto g = small_car();
  const auto r = cli({"inspect", g, "--svg", path("g.svg"), "--bins", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const PrimitiveGraph graph = load_graph(g);
  EXPECT_EQ(field(r.out, "vertices"), std::to_string(graph.vertices.size()));
  EXPECT_EQ(field(r.out, "edges"), std::to_string(graph.edges.size()));
  EXPECT_NE(r.out.find("tiling      extent (2, 2)"), std::string::npos);

  const auto ls = lines(r.out);
  std::size_t vlines = 0, hist_at = ls.size();
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (ls[i].rfind("  v", 0) == 0) ++vlines;
    if (ls[i] == "edge cost histogram over [0, 2d)") hist_at = i;
  }
  EXPECT_EQ(vlines, graph.vertices.size());
  ASSERT_EQ(hist_at + 1 + 7, ls.size());
  std::size_t total = 0;
  for (std::size_t i = hist_at + 1; i < ls.size(); ++i) total += std::stoul(ls[i].substr(ls[i].rfind(')') + 1));
  EXPECT_EQ(total, graph.edges.size());

  const std::string svg = slurp(path("g.svg"));
  EXPECT_EQ(count(svg, "<circle"), graph.vertices.size());
  EXPECT_EQ(count(svg, "<path"), graph.edges.size());
  EXPECT_EQ(count(svg, "<rect class=\"tile\""), 1u);
}

TEST_F(CliTest, InspectRejectsCorruptFile) {
  const auto g = small_car();
  std::string bytes = slurp(g);
  bytes[bytes.size() / 2] ^= 0x5a;
  std::ofstream(path("bad.mdmp"), std::ios::binary) << bytes;
  EXPECT_EQ(cli({"inspect", path("bad.mdmp")}).code, 4);
  std::ofstream(path("short.mdmp"), std::ios::binary) << bytes.substr(0, 5);
  EXPECT_EQ(cli({"inspect", path("short.mdmp")}).code, 4);
}

TEST_F(CliTest, BenchWritesTableAndCsv) {
  const auto r = cli({"bench", "--config", kConfigDir + "/di_sweep.ini", "--count", "3000", "--set",
                      "bench.dispersion_levels=[6.5, 6.0]", "--set", "dispersion.target=6.0", "--set",
                      "bench.maps=2", "--set", "bench.width=60", "--set", "bench.height=60", "--set",
                      "bench.baseline_durations=[0.5]", "--set", "bench.baseline_branching=[3]", "--set",
                      "planner.max_collision_checks=20000", "-o", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  std::size_t comments = 0;
  for (const auto& l : ls) comments += l.rfind("# ", 0) == 0;
  EXPECT_EQ(comments, 5u);
  ASSERT_EQ(ls.size(), comments + 1 + 3);
  EXPECT_EQ(ls[comments + 1].rfind("dispersion_", 0), 0u);
  EXPECT_EQ(ls[comments + 3].rfind("uniform_T0.5_b3", 0), 0u);

  const auto rec = lines(slurp(path("out/records.csv")));
  const auto agg = lines(slurp(path("out/aggregate.csv")));
  // 3 methods x 2 maps records, 3 aggregate rows, each after the comments and header row.
  EXPECT_EQ(rec.size(), 5u + 1 + 6);
  EXPECT_EQ(agg.size(), 5u + 1 + 3);
}

TEST_F(CliTest, BenchBaselinesOnlyForCarIsEmpty) {
  const auto r = cli({"bench", "--config", kConfigDir + "/rs_tiled.ini", "--set", "bench.graphs=false", "--set",
                      "bench.maps=1", "-o", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rec = lines(slurp(path("out/records.csv")));
  ASSERT_EQ(rec.size(), 6u);
  EXPECT_EQ(rec.back().rfind("map_id,method_id", 0), 0u);
}

TEST_F(CliTest, BenchCompletenessLine) {
  const auto r = cli({"bench", "--config", kConfigDir + "/rs_tiled.ini", "--count", "1500", "--target", "1.6",
                      "--set", "bench.maps=0", "--set", "bench.trials=2", "--set", "bench.trial_delta_factor=inf", "-o", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("trials 2 seed 1 success 1"), std::string::npos) << r.out;
}

TEST_F(CliTest, ConfigErrors) {
  std::ofstream(path("unknown_key.ini")) << "[system]\nkind = \"reeds_shepp\"\nwheel_base = 2\n";
  std::ofstream(path("unknown_section.ini")) << "[vehicle]\nkind = \"reeds_shepp\"\n";
  std::ofstream(path("unquoted.ini")) << "[system]\nkind = reeds_shepp\n";
  for (const char* f : {"unknown_key.ini", "unknown_section.ini", "unquoted.ini"}) {
    const auto r = cli({"generate", "--config", path(f), "-o", path("g.mdmp")});
    EXPECT_EQ(r.code, 1) << f;
    EXPECT_FALSE(r.err.empty());
  }
  EXPECT_EQ(cli({"generate", "--set", "dispersion.nope=1", "-o", path("g.mdmp")}).code, 1);
  EXPECT_EQ(cli({"generate", "--set", "no_equals_sign", "-o", path("g.mdmp")}).code, 1);
  EXPECT_EQ(cli({"generate", "--config", path("missing.ini")}).code, 1);
  EXPECT_FALSE(fs::exists(path("g.mdmp")));
}

TEST_F(CliTest, HelpAndUsage) {
  const auto h = cli({"--help"});
  EXPECT_EQ(h.code, 0);
  for (const char* sub : {"generate", "plan", "bench", "inspect"}) EXPECT_NE(h.out.find(sub), std::string::npos);
  EXPECT_EQ(cli({"plan", "--help"}).code, 0);
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
}
