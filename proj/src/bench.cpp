#include "rtpd/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "rtpd/oracle.hpp"

namespace rtpd::bench {
namespace {

using Json = nlohmann::ordered_json;

const char* status_name(DepthStatus s) { return s == DepthStatus::Ok ? "ok" : "no_overlap"; }

const char* variable_name(SweepVariable v) { return v == SweepVariable::Rate ? "rate" : "overlap_ratio"; }

template <typename T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json stats_json(const TraversalStats& s) {
  return Json{{"node_visits", s.node_visits}, {"triangle_tests", s.triangle_tests}, {"rays_cast", s.rays_cast}};
}

std::optional<double> strategy_rate(const SamplingStrategy& s) {
  if (const auto* v = std::get_if<VertexSampling>(&s)) return v->rate;
  return std::nullopt;
}

std::optional<std::uint32_t> strategy_count(const SamplingStrategy& s) {
  if (const auto* v = std::get_if<SphereSampling>(&s)) return v->count;
  if (const auto* v = std::get_if<AabbSampling>(&s)) return v->count;
  return std::nullopt;
}

SamplingStrategy with_seed(SamplingStrategy s, std::uint64_t seed) {
  std::visit([seed](auto& v) { v.seed = seed; }, s);
  return s;
}

Json run_json(const RunReport& r) {
  Json j;
  j["row"] = "run";
  j["mesh_a"] = r.scene.path_a;
  j["mesh_b"] = r.scene.path_b;
  j["overlap_ratio"] = opt(r.scene.overlap_ratio);
  j["axis"] = axis_name(r.scene.axis);
  j["translation"] = {r.translation.x, r.translation.y, r.translation.z};
  j["strategy"] = strategy_name(r.config.strategy);
  j["rate"] = opt(strategy_rate(r.config.strategy));
  j["count"] = opt(strategy_count(r.config.strategy));
  j["seed"] = strategy_seed(r.config.strategy);
  j["culling"] = r.config.culling;
  j["dpip"] = r.config.dpip_filter;
  j["status"] = status_name(r.status);
  j["depth"] = r.depth;
  j["h_ab"] = r.h_ab;
  j["h_ba"] = r.h_ba;
  j["witness_ab"] = opt(r.witness_ab);
  j["witness_ba"] = opt(r.witness_ba);
  j["penetration_points_a"] = r.penetration_points_a;
  j["penetration_points_b"] = r.penetration_points_b;
  j["surface_triangles_a"] = r.surface_triangles_a;
  j["surface_triangles_b"] = r.surface_triangles_b;
  j["unresolved_points"] = r.unresolved_points;
  j["oracle_depth"] = opt(r.oracle_depth);
  j["error_rate"] = opt(r.error_rate);
  if (r.timing) {
    j["timing_ms"] = {{"pip", r.timing->pip_ms}, {"psg", r.timing->psg_ms}, {"hdist", r.timing->hdist_ms}};
  } else {
    j["timing_ms"] = nullptr;
  }
  j["stats"] = stats_json(r.stats);
  j["pip_stats"] = stats_json(r.pip_stats);
  j["sweep_variable"] = opt(r.sweep_variable);
  j["sweep_value"] = opt(r.sweep_value);
  return j;
}

Json aggregate_json(const AggregateRow& a) {
  Json j;
  j["row"] = "aggregate";
  j["sweep_variable"] = a.variable;
  j["sweep_value"] = a.value;
  j["runs"] = a.runs;
  j["mean_depth"] = a.mean_depth;
  j["mean_error_rate"] = opt(a.mean_error_rate);
  j["max_error_rate"] = opt(a.max_error_rate);
  return j;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
std::string num_opt(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return num(*v);
  } else {
    return std::to_string(*v);
  }
}

// nlohmann prints the shortest round-trip form; reports use a fixed 17
// significant digits, so floats are written here.
void write_json(std::ostream& out, const Json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
  const std::string close_pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (j.is_object() || j.is_array()) {
    const bool obj = j.is_object();
    if (j.empty()) {
      out << (obj ? "{}" : "[]");
      return;
    }
    out << (obj ? "{\n" : "[\n");
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out << ",\n";
      first = false;
      out << pad;
      if (obj) out << Json(it.key()).dump() << ": ";
      write_json(out, *it, depth + 1);
    }
    out << '\n' << close_pad << (obj ? '}' : ']');
  } else if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      out << "null";
      return;
    }
    std::string text = num(v);
    if (text.find_first_of(".eE") == std::string::npos) text += ".0";
    out << text;
  } else {
    out << j.dump();
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Scene place_scene(const TriangleMesh& a, const TriangleMesh& base_b, const SceneConfig& config) {
  if (config.overlap_ratio && config.raw_translation) {
    throw std::invalid_argument("overlap ratio and raw translation are mutually exclusive");
  }
  Scene scene;
  scene.a = a;
  if (config.raw_translation) {
    scene.translation = *config.raw_translation;
  } else {
    scene.translation = overlap_translation(a, config.overlap_ratio.value_or(1.0), config.axis);
  }
  scene.b = translated(base_b, scene.translation);
  return scene;
}

Scene load_scene(const SceneConfig& config) {
  const TriangleMesh a = load_mesh(config.path_a);
  const TriangleMesh b = config.path_b == config.path_a ? a : load_mesh(config.path_b);
  return place_scene(a, b, config);
}

OracleSummary compute_oracle(const TriangleMesh& a, const TriangleMesh& b) {
  auto inside_points = [](const TriangleMesh& source, const TriangleMesh& other) {
    const auto verdicts = oracle::brute_pip_all(other, source.vertices);
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
      if (verdicts[i].location == oracle::Location::Inside) pts.push_back(source.vertices[i]);
    }
    return pts;
  };
  const std::vector<Vec3> pa = inside_points(a, b);
  const std::vector<Vec3> pb = inside_points(b, a);
  OracleSummary s;
  s.inside_a = pa.size();
  s.inside_b = pb.size();
  if (pa.empty() || pb.empty()) return s;
  s.h_ab = oracle::brute_hausdorff_vertices(pa, pb);
  s.h_ba = oracle::brute_hausdorff_vertices(pb, pa);
  s.depth = std::max(s.h_ab, s.h_ba);
  return s;
}

RunReport run_loaded_scene(const Scene& scene, const SceneConfig& descriptor, const HdistConfig& config,
                           const RunOptions& options, const std::optional<OracleSummary>& oracle,
                           PenetrationRun* detail) {
  PenetrationRun run = run_penetration_depth(scene.a, scene.b, config, options.pip_axis);
  RunReport r;
  r.scene = descriptor;
  r.translation = scene.translation;
  r.config = config;
  r.status = run.result.status;
  r.depth = run.result.depth;
  r.h_ab = run.result.h_ab;
  r.h_ba = run.result.h_ba;
  r.witness_ab = run.result.witness_ab;
  r.witness_ba = run.result.witness_ba;
  r.penetration_points_a = run.surface_a.point_set.points.size();
  r.penetration_points_b = run.surface_b.point_set.points.size();
  r.surface_triangles_a = run.surface_a.triangles.size();
  r.surface_triangles_b = run.surface_b.triangles.size();
  r.unresolved_points = run.result.unresolved_points;
  r.stats = run.result.stats;
  r.pip_stats = run.pip_stats;
  if (options.with_timing) r.timing = run.timings;
  if (options.with_oracle) {
    const OracleSummary truth = oracle ? *oracle : compute_oracle(scene.a, scene.b);
    r.oracle_depth = truth.depth;
    if (truth.depth != 0.0) r.error_rate = std::abs(r.depth - truth.depth) / truth.depth;
  }
  if (detail) *detail = std::move(run);
  return r;
}

RunReport run_scene(const SceneConfig& scene, const HdistConfig& config, const RunOptions& options) {
  return run_loaded_scene(load_scene(scene), scene, config, options);
}

SweepResult run_sweep(const SceneConfig& scene, const HdistConfig& base, const SweepSpec& sweep,
                      const RunOptions& options) {
  if (sweep.values.empty() || sweep.seeds.empty()) {
    throw std::invalid_argument("a sweep needs at least one value and one seed");
  }
  if (sweep.variable == SweepVariable::Rate && !std::holds_alternative<VertexSampling>(base.strategy)) {
    throw std::invalid_argument("a rate sweep requires the vertex sampling strategy");
  }
  const TriangleMesh a = load_mesh(scene.path_a);
  const TriangleMesh b = scene.path_b == scene.path_a ? a : load_mesh(scene.path_b);

  SweepResult result;
  std::optional<Scene> placed;
  std::optional<OracleSummary> truth;
  for (double value : sweep.values) {
    SceneConfig descriptor = scene;
    HdistConfig config = base;
    if (sweep.variable == SweepVariable::OverlapRatio) {
      descriptor.overlap_ratio = value;
      descriptor.raw_translation.reset();
      placed = place_scene(a, b, descriptor);
      truth.reset();
    } else {
      std::get<VertexSampling>(config.strategy).rate = value;
      if (!placed) placed = place_scene(a, b, descriptor);
    }
    if (options.with_oracle && !truth) truth = compute_oracle(placed->a, placed->b);
    for (std::uint64_t seed : sweep.seeds) {
      config.strategy = with_seed(config.strategy, seed);
      RunReport r = run_loaded_scene(*placed, descriptor, config, options, truth);
      r.sweep_variable = variable_name(sweep.variable);
      r.sweep_value = value;
      result.runs.push_back(std::move(r));
    }
  }
  result.aggregates = aggregate(result.runs);
  return result;
}

std::vector<AggregateRow> aggregate(const std::vector<RunReport>& runs) {
  std::vector<AggregateRow> rows;
  for (const RunReport& r : runs) {
    if (!r.sweep_variable || !r.sweep_value) continue;
    auto it = std::find_if(rows.begin(), rows.end(), [&](const AggregateRow& a) {
      return a.variable == *r.sweep_variable && a.value == *r.sweep_value;
    });
    if (it == rows.end()) {
      AggregateRow row;
      row.variable = *r.sweep_variable;
      row.value = *r.sweep_value;
      rows.push_back(std::move(row));
      it = rows.end() - 1;
    }
    it->runs += 1;
    it->mean_depth += r.depth;
    if (r.error_rate) {
      it->mean_error_rate = it->mean_error_rate.value_or(0.0) + *r.error_rate;
      it->max_error_rate = std::max(it->max_error_rate.value_or(0.0), *r.error_rate);
    }
  }
  for (AggregateRow& a : rows) {
    const std::size_t with_error = static_cast<std::size_t>(
        std::count_if(runs.begin(), runs.end(), [&](const RunReport& r) {
          return r.sweep_variable == a.variable && r.sweep_value == a.value && r.error_rate.has_value();
        }));
    a.mean_depth /= static_cast<double>(a.runs);
    if (a.mean_error_rate) *a.mean_error_rate /= static_cast<double>(with_error);
  }
  return rows;
}

const std::vector<std::string>& csv_header() {
  static const std::vector<std::string> header = {
      "row", "mesh_a", "mesh_b", "overlap_ratio", "axis", "translation_x", "translation_y",
      "translation_z", "strategy", "rate", "count", "seed", "culling", "dpip", "status", "depth", "h_ab",
      "h_ba", "witness_ab", "witness_ba", "penetration_points_a", "penetration_points_b",
      "surface_triangles_a", "surface_triangles_b", "unresolved_points", "oracle_depth", "error_rate",
      "pip_ms", "psg_ms", "hdist_ms", "node_visits", "triangle_tests", "rays_cast", "pip_node_visits",
      "pip_triangle_tests", "pip_rays_cast", "sweep_variable", "sweep_value", "runs", "mean_depth",
      "mean_error_rate", "max_error_rate"};
  return header;
}

void emit_report(std::ostream& out, const std::vector<RunReport>& runs,
                 const std::vector<AggregateRow>& aggregates, ReportFormat format) {
  if (format == ReportFormat::Json) {
    Json arr = Json::array();
    for (const RunReport& r : runs) arr.push_back(run_json(r));
    for (const AggregateRow& a : aggregates) arr.push_back(aggregate_json(a));
    write_json(out, arr, 0);
    out << '\n';
    return;
  }

  const auto& header = csv_header();
  auto write_row = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << csv_field(cells[i]);
    }
    out << '\n';
  };
  write_row(header);
  for (const RunReport& r : runs) {
    const auto t = r.timing;
    write_row({"run", r.scene.path_a, r.scene.path_b, num_opt(r.scene.overlap_ratio), axis_name(r.scene.axis),
               num(r.translation.x), num(r.translation.y), num(r.translation.z),
               strategy_name(r.config.strategy), num_opt(strategy_rate(r.config.strategy)),
               num_opt(strategy_count(r.config.strategy)), std::to_string(strategy_seed(r.config.strategy)),
               r.config.culling ? "on" : "off", r.config.dpip_filter ? "on" : "off", status_name(r.status),
               num(r.depth), num(r.h_ab), num(r.h_ba), num_opt(r.witness_ab), num_opt(r.witness_ba),
               std::to_string(r.penetration_points_a), std::to_string(r.penetration_points_b),
               std::to_string(r.surface_triangles_a), std::to_string(r.surface_triangles_b),
               std::to_string(r.unresolved_points), num_opt(r.oracle_depth), num_opt(r.error_rate),
               t ? num(t->pip_ms) : "", t ? num(t->psg_ms) : "", t ? num(t->hdist_ms) : "",
               std::to_string(r.stats.node_visits), std::to_string(r.stats.triangle_tests),
               std::to_string(r.stats.rays_cast), std::to_string(r.pip_stats.node_visits),
               std::to_string(r.pip_stats.triangle_tests), std::to_string(r.pip_stats.rays_cast),
               r.sweep_variable.value_or(""), num_opt(r.sweep_value), "", "", "", ""});
  }
  for (const AggregateRow& a : aggregates) {
    std::vector<std::string> cells(header.size());
    cells[0] = "aggregate";
    cells[header.size() - 6] = a.variable;
    cells[header.size() - 5] = num(a.value);
    cells[header.size() - 4] = std::to_string(a.runs);
    cells[header.size() - 3] = num(a.mean_depth);
    cells[header.size() - 2] = num_opt(a.mean_error_rate);
    cells[header.size() - 1] = num_opt(a.max_error_rate);
    write_row(cells);
  }
}

}  // namespace rtpd::bench
