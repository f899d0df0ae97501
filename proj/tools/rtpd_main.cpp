// rtpd: penetration depth between two closed triangle meshes.
//
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rtpd/bench.hpp"
#include "rtpd/parallel.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

int usage_error(const std::string& msg) {
  std::cerr << "rtpd: usage error: " << one_line(msg) << '\n';
  return kExitUsage;
}

void print_stats(const rtpd::bench::RunReport& r) {
  std::cerr << "pip:   rays " << r.pip_stats.rays_cast << ", nodes " << r.pip_stats.node_visits
            << ", triangles " << r.pip_stats.triangle_tests << '\n'
            << "hdist: rays " << r.stats.rays_cast << ", nodes " << r.stats.node_visits << ", triangles "
            << r.stats.triangle_tests << ", unresolved points " << r.unresolved_points << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ray-cast penetration depth between two closed triangle meshes"};

  std::string mesh_a;
  std::string mesh_b;
  std::optional<double> overlap;
  std::string axis = "x";
  std::vector<double> raw_translate;
  std::string strategy = "vertex";
  double rate = 0.01;
  std::uint32_t count = 64;
  std::uint64_t seed = 0;
  std::string culling = "on";
  std::string dpip = "on";
  bool with_oracle = false;
  std::vector<double> sweep_rate;
  std::vector<double> sweep_overlap;
  std::vector<std::uint64_t> seeds;
  std::string format = "json";
  std::string out_path;
  bool show_stats = false;
  bool no_timing = false;
  unsigned threads = 0;
  std::string export_prefix;
  std::string dump_flags;

  app.add_option("--mesh-a", mesh_a, "First mesh (OBJ or ASCII PLY)")->required();
  app.add_option("--mesh-b", mesh_b, "Second mesh (defaults to --mesh-a)");
  auto* overlap_opt = app.add_option("--overlap", overlap, "AABB overlap ratio in (0,1] along --axis");
  app.add_option("--axis", axis, "Placement axis")->check(CLI::IsMember({"x", "y", "z"}));
  auto* raw_opt = app.add_option("--raw-translate", raw_translate, "Translate mesh B by DX DY DZ")
                      ->expected(3)
                      ->excludes(overlap_opt);
  overlap_opt->excludes(raw_opt);
  app.add_option("--strategy", strategy, "Ray sampling strategy")
      ->check(CLI::IsMember({"vertex", "sphere", "aabb"}));
  auto* rate_opt = app.add_option("--rate", rate, "Vertex sampling rate in (0,1]");
  auto* count_opt = app.add_option("--count", count, "Rays per point for sphere/aabb sampling");
  rate_opt->excludes(count_opt);
  app.add_option("--seed", seed, "Sampling seed");
  app.add_option("--culling", culling, "Ray-length adaptation culling")->check(CLI::IsMember({"on", "off"}));
  app.add_option("--dpip", dpip, "Restrict sampling to the PIP hit distance")->check(CLI::IsMember({"on", "off"}));
  app.add_flag("--oracle", with_oracle, "Also compute the brute-force vertex-pair ground truth");
  auto* sr = app.add_option("--sweep-rate", sweep_rate, "Comma-separated sampling rates")->delimiter(',');
  auto* so = app.add_option("--sweep-overlap", sweep_overlap, "Comma-separated overlap ratios")->delimiter(',');
  sr->excludes(so);
  app.add_option("--seeds", seeds, "Comma-separated seeds for sweeps")->delimiter(',');
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", out_path, "Write the report here instead of standard output");
  app.add_flag("--stats", show_stats, "Print traversal statistics to standard error");
  app.add_flag("--no-timing", no_timing, "Omit stage timings so reports are reproducible byte for byte");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");
  app.add_option("--export-surfaces", export_prefix, "Write penetration surfaces to PREFIX_a.obj / PREFIX_b.obj");
  app.add_option("--dump-flags", dump_flags, "Write per-vertex inside flags as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage_error(e.what());
  }

  if (strategy == "vertex" && count_opt->count() > 0) return usage_error("--count applies to sphere/aabb sampling");
  if (strategy != "vertex" && rate_opt->count() > 0) return usage_error("--rate applies to vertex sampling");
  if (!sweep_rate.empty() && strategy != "vertex") return usage_error("--sweep-rate requires --strategy vertex");
  if (overlap && !(*overlap > 0.0 && *overlap <= 1.0)) return usage_error("--overlap must lie in (0, 1]");
  if (strategy == "vertex" && !(rate > 0.0 && rate <= 1.0)) return usage_error("--rate must lie in (0, 1]");
  if (strategy != "vertex" && count < 1) return usage_error("--count must be >= 1");
  const bool sweeping = !sweep_rate.empty() || !sweep_overlap.empty();
  if (sweeping && (!export_prefix.empty() || !dump_flags.empty())) {
    return usage_error("--export-surfaces and --dump-flags apply to single runs only");
  }

  rtpd::set_thread_count(threads);

  rtpd::bench::SceneConfig scene;
  scene.path_a = mesh_a;
  scene.path_b = mesh_b.empty() ? mesh_a : mesh_b;
  scene.axis = rtpd::parse_axis(axis);
  if (!raw_translate.empty()) {
    scene.raw_translation = rtpd::Vec3{raw_translate[0], raw_translate[1], raw_translate[2]};
  } else {
    scene.overlap_ratio = overlap.value_or(0.5);
  }

  rtpd::HdistConfig config;
  if (strategy == "vertex") {
    config.strategy = rtpd::VertexSampling{rate, seed};
  } else if (strategy == "sphere") {
    config.strategy = rtpd::SphereSampling{count, seed};
  } else {
    config.strategy = rtpd::AabbSampling{count, seed};
  }
  config.culling = culling == "on";
  config.dpip_filter = dpip == "on";

  rtpd::bench::RunOptions options;
  options.with_oracle = with_oracle;
  options.with_timing = !no_timing;

  try {
    std::vector<rtpd::bench::RunReport> runs;
    std::vector<rtpd::bench::AggregateRow> aggregates;
    if (sweeping) {
      rtpd::bench::SweepSpec spec;
      spec.variable = sweep_rate.empty() ? rtpd::bench::SweepVariable::OverlapRatio : rtpd::bench::SweepVariable::Rate;
      spec.values = sweep_rate.empty() ? sweep_overlap : sweep_rate;
      spec.seeds = seeds.empty() ? std::vector<std::uint64_t>{seed} : seeds;
      auto result = rtpd::bench::run_sweep(scene, config, spec, options);
      runs = std::move(result.runs);
      aggregates = std::move(result.aggregates);
    } else {
      const rtpd::bench::Scene placed = rtpd::bench::load_scene(scene);
      const auto seed_list = seeds.empty() ? std::vector<std::uint64_t>{seed} : seeds;
      for (std::uint64_t s : seed_list) {
        std::visit([s](auto& v) { v.seed = s; }, config.strategy);
        rtpd::PenetrationRun detail;
        runs.push_back(rtpd::bench::run_loaded_scene(placed, scene, config, options, std::nullopt, &detail));
        if (!export_prefix.empty()) {
          rtpd::save_mesh(export_prefix + "_a.obj", rtpd::to_mesh(detail.surface_a));
          rtpd::save_mesh(export_prefix + "_b.obj", rtpd::to_mesh(detail.surface_b));
        }
        if (!dump_flags.empty()) {
          nlohmann::json j;
          j["a"] = detail.surface_a.point_set.inside_flags;
          j["b"] = detail.surface_b.point_set.inside_flags;
          std::ofstream f(dump_flags);
          f << j.dump() << '\n';
          if (!f) throw std::runtime_error("cannot write " + dump_flags);
        }
      }
    }
    if (show_stats) {
      for (const auto& r : runs) print_stats(r);
    }
    const auto fmt = format == "json" ? rtpd::bench::ReportFormat::Json : rtpd::bench::ReportFormat::Csv;
    if (out_path.empty()) {
      rtpd::bench::emit_report(std::cout, runs, aggregates, fmt);
      std::cout.flush();
      if (!std::cout) throw std::runtime_error("failed writing to standard output");
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
      rtpd::bench::emit_report(out, runs, aggregates, fmt);
      out.flush();
      if (!out) throw std::runtime_error("failed writing " + out_path);
    }
  } catch (const std::invalid_argument& e) {
    return usage_error(e.what());
  } catch (const std::exception& e) {
    std::cerr << "rtpd: error: " << one_line(e.what()) << '\n';
    return kExitRuntime;
  }
  return 0;
}
