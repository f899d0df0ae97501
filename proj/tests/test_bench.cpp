#include <gtest/gtest.h>
#include <json.hpp>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rtpd/bench.hpp"
#include "rtpd/shapes.hpp"

namespace rtpd::bench {
namespace {

namespace fs = std::filesystem;

class BenchTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "rtpd_bench_test";
    fs::create_directories(dir_);
    save_mesh(dir_ / "ico.obj", shapes::icosphere(2));
    save_mesh(dir_ / "cube.ply", shapes::box(3));
    TriangleMesh open = shapes::box(1);
    open.triangles.pop_back();
    save_mesh(dir_ / "open.obj", open);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string path(const char* name) { return (dir_ / name).string(); }

  static SceneConfig ico_scene(double ratio) {
    SceneConfig s;
    s.path_a = s.path_b = path("ico.obj");
    s.overlap_ratio = ratio;
    return s;
  }

  static int run_cli(const std::string& args, std::string* out = nullptr, std::string* err = nullptr) {
    const fs::path o = dir_ / "stdout.txt";
    const fs::path e = dir_ / "stderr.txt";
    const std::string cmd = std::string(RTPD_CLI) + " " + args + " >" + o.string() + " 2>" + e.string();
    const int status = std::system(cmd.c_str());
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    if (out) *out = slurp(o);
    if (err) *err = slurp(e);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static inline fs::path dir_;
};

TEST_F(BenchTest, DisjointSceneReportsNoOverlap) {
  SceneConfig s;
  s.path_a = s.path_b = path("cube.ply");
  s.raw_translation = Vec3{3, 0, 0};
  const RunReport r = run_scene(s, HdistConfig{}, RunOptions{});
  EXPECT_EQ(r.status, DepthStatus::NoOverlap);
  EXPECT_EQ(r.depth, 0.0);
}

TEST_F(BenchTest, IdenticalMeshesOmitErrorRate) {
  HdistConfig cfg;
  cfg.strategy = VertexSampling{1.0, 0};
  RunOptions opts;
  opts.with_oracle = true;
  const RunReport r = run_scene(ico_scene(1.0), cfg, opts);
  EXPECT_LE(r.depth, 1e-9);
  ASSERT_TRUE(r.oracle_depth);
  EXPECT_EQ(*r.oracle_depth, 0.0);
  EXPECT_FALSE(r.error_rate);
}

TEST_F(BenchTest, OracleErrorRate) {
  HdistConfig cfg;
  cfg.strategy = VertexSampling{1.0, 0};
  RunOptions opts;
  opts.with_oracle = true;
  const RunReport r = run_scene(ico_scene(0.5), cfg, opts);
  ASSERT_TRUE(r.oracle_depth && r.error_rate);
  EXPECT_EQ(*r.error_rate, std::abs(r.depth - *r.oracle_depth) / *r.oracle_depth);
  // Identical scene placed by hand gives the same oracle value.
  const TriangleMesh a = shapes::icosphere(2);
  const OracleSummary truth = compute_oracle(a, translated(a, overlap_translation(a, 0.5, Axis::X)));
  EXPECT_EQ(truth.depth, *r.oracle_depth);
  EXPECT_LE(r.depth, truth.depth + 1e-9);
}

TEST_F(BenchTest, SweepCountingContract) {
  SweepSpec sweep;
  sweep.variable = SweepVariable::Rate;
  sweep.values = {0.01};
  for (std::uint64_t s = 1; s <= 10; ++s) sweep.seeds.push_back(s);
  const SweepResult res = run_sweep(ico_scene(0.5), HdistConfig{}, sweep, RunOptions{});
  ASSERT_EQ(res.runs.size(), 10u);
  ASSERT_EQ(res.aggregates.size(), 1u);
  EXPECT_EQ(res.aggregates[0].runs, 10u);
  EXPECT_EQ(res.aggregates[0].variable, "rate");
  double mean = 0.0;
  for (std::size_t i = 0; i < res.runs.size(); ++i) {
    EXPECT_EQ(strategy_seed(res.runs[i].config.strategy), i + 1);
    mean += res.runs[i].depth;
  }
  EXPECT_DOUBLE_EQ(res.aggregates[0].mean_depth, mean / 10.0);
  EXPECT_FALSE(res.aggregates[0].mean_error_rate);
}

TEST_F(BenchTest, SweepRejectsBadSpecs) {
  SweepSpec sweep;
  EXPECT_THROW(run_sweep(ico_scene(0.5), HdistConfig{}, sweep, RunOptions{}), std::invalid_argument);
  sweep.values = {0.1};
  sweep.seeds = {1};
  HdistConfig sphere;
  sphere.strategy = SphereSampling{};
  EXPECT_THROW(run_sweep(ico_scene(0.5), sphere, sweep, RunOptions{}), std::invalid_argument);
}

TEST_F(BenchTest, OverlapSweepPointCountsGrow) {
  SweepSpec sweep;
  sweep.variable = SweepVariable::OverlapRatio;
  sweep.values = {0.1, 0.5, 0.9};
  sweep.seeds = {0};
  RunOptions opts;
  opts.with_oracle = true;
  const SweepResult res = run_sweep(ico_scene(0.5), HdistConfig{}, sweep, opts);
  ASSERT_EQ(res.runs.size(), 3u);
  ASSERT_EQ(res.aggregates.size(), 3u);
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_GE(res.runs[i].penetration_points_a, res.runs[i - 1].penetration_points_a);
    EXPECT_GE(res.runs[i].penetration_points_b, res.runs[i - 1].penetration_points_b);
  }
  // The oracle inside sets grow the same way.
  std::size_t last = 0;
  const TriangleMesh a = shapes::icosphere(2);
  for (double ratio : sweep.values) {
    const auto truth = compute_oracle(a, translated(a, overlap_translation(a, ratio, Axis::X)));
    EXPECT_GE(truth.inside_a, last);
    last = truth.inside_a;
  }
}

TEST(Report, EmptyCsvIsHeaderOnly) {
  std::ostringstream out;
  emit_report(out, {}, {}, ReportFormat::Csv);
  std::string expect;
  for (std::size_t i = 0; i < csv_header().size(); ++i) expect += (i ? "," : "") + csv_header()[i];
  EXPECT_EQ(out.str(), expect + "\n");
}

RunReport sample_report() {
  RunReport r;
  r.scene.path_a = "a.obj";
  r.scene.path_b = "b,\"x\".obj";
  r.scene.overlap_ratio = 0.5;
  r.translation = {0.1, 0.0, -2.5e-7};
  r.config.strategy = SphereSampling{12, 99};
  r.depth = 1.0 / 3.0;
  r.h_ab = 1.0 / 3.0;
  r.h_ba = 0.1;
  r.witness_ab = 17;
  r.oracle_depth = 0.3;
  r.error_rate = std::abs(r.depth - 0.3) / 0.3;
  r.timing = StageTimings{1.5, 2.25, 3.125};
  r.stats = {10, 20, 30};
  r.pip_stats = {1, 2, 3};
  return r;
}

TEST(Report, JsonRoundTrip) {
  std::ostringstream out;
  emit_report(out, {sample_report()}, {}, ReportFormat::Json);
  const auto j = nlohmann::json::parse(out.str());
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), 1u);
  const auto& o = j[0];
  const RunReport r = sample_report();
  EXPECT_EQ(o["row"], "run");
  EXPECT_EQ(o["mesh_b"], r.scene.path_b);
  EXPECT_EQ(o["depth"].get<double>(), r.depth);
  EXPECT_EQ(o["h_ba"].get<double>(), r.h_ba);
  EXPECT_EQ(o["error_rate"].get<double>(), *r.error_rate);
  EXPECT_EQ(o["translation"][2].get<double>(), r.translation.z);
  EXPECT_EQ(o["witness_ab"], 17);
  EXPECT_TRUE(o["witness_ba"].is_null());
  EXPECT_EQ(o["strategy"], "sphere");
  EXPECT_EQ(o["count"], 12);
  EXPECT_TRUE(o["rate"].is_null());
  EXPECT_EQ(o["seed"], 99);
  EXPECT_EQ(o["timing_ms"]["psg"].get<double>(), 2.25);
  EXPECT_EQ(o["stats"]["triangle_tests"], 20);
  for (const auto& key : {"mesh_a", "overlap_ratio", "axis", "culling", "dpip", "status", "h_ab",
                          "penetration_points_a", "surface_triangles_b", "unresolved_points",
                          "oracle_depth", "pip_stats", "sweep_variable", "sweep_value"}) {
    EXPECT_TRUE(o.contains(key)) << key;
  }
  // 17 significant digits.
  EXPECT_NE(out.str().find("0.33333333333333331"), std::string::npos);
}

TEST(Report, CsvRow) {
  std::ostringstream out;
  emit_report(out, {sample_report()}, {}, ReportFormat::Csv);
  std::istringstream in(out.str());
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_FALSE(std::getline(in, extra));
  EXPECT_NE(row.find("\"b,\"\"x\"\".obj\""), std::string::npos);
  EXPECT_NE(row.find("0.33333333333333331"), std::string::npos);
}

TEST(Report, AggregateRows) {
  RunReport a = sample_report(), b = sample_report();
  a.sweep_variable = b.sweep_variable = "rate";
  a.sweep_value = b.sweep_value = 0.01;
  b.error_rate = 0.5;
  const auto rows = aggregate({a, b});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].runs, 2u);
  EXPECT_DOUBLE_EQ(*rows[0].mean_error_rate, (*a.error_rate + 0.5) / 2);
  EXPECT_EQ(*rows[0].max_error_rate, 0.5);
  std::ostringstream out;
  emit_report(out, {a, b}, rows, ReportFormat::Json);
  const auto j = nlohmann::json::parse(out.str());
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j[2]["row"], "aggregate");
  EXPECT_EQ(j[2]["runs"], 2);
}

TEST_F(BenchTest, CliSuccessAndDeterminism) {
  std::string out1, out2;
  const std::string args = "--mesh-a " + path("ico.obj") + " --overlap 0.5 --no-timing --seed 3";
  EXPECT_EQ(run_cli(args + " --threads 1", &out1), 0);
  EXPECT_EQ(run_cli(args + " --threads 3", &out2), 0);
  EXPECT_EQ(out1, out2);
  const auto j = nlohmann::json::parse(out1);
  EXPECT_EQ(j[0]["status"], "ok");
  EXPECT_TRUE(j[0]["timing_ms"].is_null());
}

TEST_F(BenchTest, CliCsvSweepToFile) {
  const std::string csv = path("sweep.csv");
  EXPECT_EQ(run_cli("--mesh-a " + path("ico.obj") + " --sweep-rate 0.1,0.5 --seeds 1,2 --format csv --out " + csv), 0);
  std::ifstream in(csv);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 1 + 4 + 2);
}

TEST_F(BenchTest, CliExportsAndStats) {
  std::string err;
  const std::string prefix = path("surf");
  const std::string flags = path("flags.json");
  EXPECT_EQ(run_cli("--mesh-a " + path("ico.obj") + " --overlap 0.5 --stats --export-surfaces " + prefix +
                        " --dump-flags " + flags,
                    nullptr, &err),
            0);
  EXPECT_NE(err.find("triangles"), std::string::npos);
  const TriangleMesh sa = load_mesh(prefix + "_a.obj");
  EXPECT_GT(sa.triangle_count(), 0u);
  std::ifstream in(flags);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["a"].size(), shapes::icosphere(2).vertex_count());
}

TEST_F(BenchTest, CliErrors) {
  std::string err;
  EXPECT_EQ(run_cli("--overlap 0.5", nullptr, &err), 1);
  EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
  EXPECT_EQ(run_cli("--mesh-a " + path("ico.obj") + " --overlap 1.5", nullptr, &err), 1);
  EXPECT_EQ(run_cli("--mesh-a " + path("ico.obj") + " --strategy cone"), 1);
  EXPECT_EQ(run_cli("--mesh-a " + path("ico.obj") + " --overlap 0.5 --raw-translate 1 0 0"), 1);
  EXPECT_EQ(run_cli("--mesh-a " + path("ico.obj") + " --strategy sphere --rate 0.1"), 1);
  EXPECT_EQ(run_cli("--mesh-a " + path("ico.obj") + " --frobnicate"), 1);
  EXPECT_EQ(run_cli("--mesh-a " + path("missing.obj"), nullptr, &err), 2);
  EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
  EXPECT_EQ(run_cli("--mesh-a " + path("open.obj") + " --overlap 0.5", nullptr, &err), 2);
  EXPECT_NE(err.find("not closed"), std::string::npos);
  EXPECT_EQ(run_cli("--mesh-a " + path("ico.obj") + " --out /nonexistent/dir/x.json"), 2);
}

}  // namespace
}  // namespace rtpd::bench
