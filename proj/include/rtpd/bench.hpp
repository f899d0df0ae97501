#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rtpd/hdist.hpp"
#include "rtpd/mesh.hpp"

// Benchmark harness behind the command-line tool: scene setup, pipeline runs,
// oracle comparison and report serialisation.
namespace rtpd::bench {

struct SceneConfig {
  std::string path_a;
  std::string path_b;                      // may equal path_a
  std::optional<double> overlap_ratio;     // exclusive with raw_translation
  std::optional<Vec3> raw_translation;
  Axis axis = Axis::X;
};

/// Loaded meshes plus the translation that was applied to B.
struct Scene {
  TriangleMesh a;
  TriangleMesh b;
  Vec3 translation;
};

Scene load_scene(const SceneConfig& config);
/// Places `base_b` relative to `a` according to the config (no file access).
Scene place_scene(const TriangleMesh& a, const TriangleMesh& base_b, const SceneConfig& config);

/// Ground truth from brute-force classification and all vertex pairs.
struct OracleSummary {
  double depth = 0.0;
  double h_ab = 0.0;
  double h_ba = 0.0;
  std::size_t inside_a = 0;
  std::size_t inside_b = 0;
};

OracleSummary compute_oracle(const TriangleMesh& a, const TriangleMesh& b);

struct RunReport {
  SceneConfig scene;
  Vec3 translation;
  HdistConfig config;
  DepthStatus status = DepthStatus::Ok;
  double depth = 0.0;
  double h_ab = 0.0;
  double h_ba = 0.0;
  std::optional<std::uint32_t> witness_ab;
  std::optional<std::uint32_t> witness_ba;
  std::size_t penetration_points_a = 0;
  std::size_t penetration_points_b = 0;
  std::size_t surface_triangles_a = 0;
  std::size_t surface_triangles_b = 0;
  std::uint64_t unresolved_points = 0;
  std::optional<double> oracle_depth;
  std::optional<double> error_rate;  // present iff oracle_depth is present and nonzero
  std::optional<StageTimings> timing;
  TraversalStats stats;
  TraversalStats pip_stats;
  std::optional<std::string> sweep_variable;
  std::optional<double> sweep_value;
};

struct AggregateRow {
  std::string variable;
  double value = 0.0;
  std::size_t runs = 0;
  double mean_depth = 0.0;
  std::optional<double> mean_error_rate;
  std::optional<double> max_error_rate;
};

struct RunOptions {
  bool with_oracle = false;
  bool with_timing = true;
  Vec3 pip_axis{1, 0, 0};
};

RunReport run_scene(const SceneConfig& scene, const HdistConfig& config, const RunOptions& options);

/// Runs an already-placed scene. `oracle` short-circuits the brute-force pass
/// when the caller has it cached; `detail` receives the intermediate surfaces.
RunReport run_loaded_scene(const Scene& scene, const SceneConfig& descriptor, const HdistConfig& config,
                           const RunOptions& options, const std::optional<OracleSummary>& oracle = std::nullopt,
                           PenetrationRun* detail = nullptr);

enum class SweepVariable { Rate, OverlapRatio };

struct SweepSpec {
  SweepVariable variable = SweepVariable::Rate;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
};

struct SweepResult {
  std::vector<RunReport> runs;  // value-major, then seed order
  std::vector<AggregateRow> aggregates;
};

SweepResult run_sweep(const SceneConfig& scene, const HdistConfig& base, const SweepSpec& sweep,
                      const RunOptions& options);

std::vector<AggregateRow> aggregate(const std::vector<RunReport>& runs);

enum class ReportFormat { Json, Csv };

/// Column order of the CSV output.
const std::vector<std::string>& csv_header();

void emit_report(std::ostream& out, const std::vector<RunReport>& runs,
                 const std::vector<AggregateRow>& aggregates, ReportFormat format);

}  // namespace rtpd::bench
