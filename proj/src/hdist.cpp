#include "rtpd/hdist.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "rtpd/parallel.hpp"

namespace rtpd {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ull)));
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

const char* strategy_name(const SamplingStrategy& s) {
  switch (s.index()) {
    case 0:
      return "vertex";
    case 1:
      return "sphere";
    default:
      return "aabb";
  }
}

std::uint64_t strategy_seed(const SamplingStrategy& s) {
  return std::visit([](const auto& v) { return v.seed; }, s);
}

void validate_strategy(const SamplingStrategy& s) {
  if (const auto* v = std::get_if<VertexSampling>(&s)) {
    if (!(v->rate > 0.0 && v->rate <= 1.0)) throw std::invalid_argument("sampling rate must lie in (0, 1]");
  } else {
    const std::uint32_t count =
        std::holds_alternative<SphereSampling>(s) ? std::get<SphereSampling>(s).count : std::get<AabbSampling>(s).count;
    if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  }
}

std::size_t vertex_sampling_stride(double rate) {
  if (!(rate > 0.0 && rate <= 1.0)) throw std::invalid_argument("sampling rate must lie in (0, 1]");
  // The small bias keeps e.g. rate 0.01 at stride 100 despite 1/0.01 rounding.
  const double inv = std::floor(1.0 / rate + 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(inv));
}

std::vector<RaySample> sample_directions_vertex(const Vec3& query, std::span<const Vec3> targets,
                                                double rate, std::uint64_t seed,
                                                std::optional<double> dpip) {
  if (targets.empty()) throw std::invalid_argument("vertex sampling needs at least one target vertex");
  const std::size_t stride = vertex_sampling_stride(rate);
  const std::size_t start = static_cast<std::size_t>(seed % stride);

  std::vector<RaySample> out;
  out.reserve((targets.size() + stride - 1) / stride);
  RaySample nearest;
  auto make = [&](const Vec3& v) {
    const Vec3 d = v - query;
    const double len = length(d);
    return RaySample{len > 0.0 ? d / len : Vec3{}, len};
  };
  // When seed mod stride overshoots a short list, wrap the offset.
  const std::size_t first = start < targets.size() ? start : start % targets.size();
  for (std::size_t i = first; i < targets.size(); i += stride) {
    const RaySample s = make(targets[i]);
    if (s.target_distance < nearest.target_distance) nearest = s;
    if (dpip && s.target_distance > *dpip) continue;
    out.push_back(s);
  }
  if (out.empty()) out.push_back(nearest);
  return out;
}

std::vector<RaySample> sample_directions_sphere(std::uint32_t count, std::uint64_t seed,
                                                std::uint64_t stream) {
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  auto rng = stream_engine(seed, stream);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RaySample> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * unit(rng);
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.push_back({normalize(Vec3{r * std::cos(phi), r * std::sin(phi), z})});
  }
  return out;
}

std::vector<RaySample> sample_directions_aabb(const Vec3& query, const Aabb& box, std::uint32_t count,
                                              std::uint64_t seed, std::uint64_t stream) {
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  if (box.empty()) throw std::invalid_argument("AABB sampling needs a non-empty box");
  const Vec3 ext = box.extent();
  if (ext == Vec3{} && box.min == query) {
    throw std::invalid_argument("AABB sampling box collapses onto the query point");
  }
  auto rng = stream_engine(seed, stream);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RaySample> out;
  out.reserve(count);
  while (out.size() < count) {
    const Vec3 p{box.min.x + ext.x * unit(rng), box.min.y + ext.y * unit(rng), box.min.z + ext.z * unit(rng)};
    const Vec3 d = p - query;
    const double len = length(d);
    if (len == 0.0) continue;
    out.push_back({d / len});
  }
  return out;
}

double min_distance_for_point(const Bvh& target, const Vec3& query, std::span<const RaySample> samples,
                              bool culling, double init_tmax, TraversalStats* stats) {
  if (samples.empty()) throw std::invalid_argument("min_distance_for_point needs at least one sample");
  double best = kInfinity;
  for (const RaySample& s : samples) {
    if (s.target_distance == 0.0) return 0.0;  // the query sits on the target
    const double t_max = culling ? std::min(best, init_tmax) : init_tmax;
    const auto hit = target.closest_hit(Ray{query, s.direction, t_max}, stats);
    if (hit) best = std::min(best, hit->t);
    best = std::min(best, s.target_distance);
  }
  if (std::isinf(best) && std::isfinite(init_tmax)) return init_tmax;
  return best;
}

std::vector<double> per_point_distances(const PenetrationPointSet& sources,
                                        const PenetrationSurface& target, const HdistConfig& config,
                                        TraversalStats* stats) {
  validate_strategy(config.strategy);
  if (sources.empty()) throw std::invalid_argument("directional Hausdorff needs at least one source point");
  if (target.empty() || !target.bvh) throw std::invalid_argument("directional Hausdorff needs a non-empty target surface");

  const Aabb target_box = target.bounds();
  const std::size_t n = sources.points.size();
  std::vector<double> dist(n, kInfinity);
  std::vector<TraversalStats> chunk_stats(thread_count());
  parallel_chunks(n, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    TraversalStats local;
    for (std::size_t i = begin; i < end; ++i) {
      const PenetrationPoint& p = sources.points[i];
      const double init_tmax = config.dpip_filter ? p.d_pip : kInfinity;
      std::vector<RaySample> samples;
      if (const auto* v = std::get_if<VertexSampling>(&config.strategy)) {
        samples = sample_directions_vertex(p.position, target.vertices, v->rate, v->seed,
                                           config.dpip_filter ? std::optional<double>(p.d_pip) : std::nullopt);
      } else if (const auto* s = std::get_if<SphereSampling>(&config.strategy)) {
        samples = sample_directions_sphere(s->count, s->seed, p.original_vertex_id);
      } else {
        const auto& a = std::get<AabbSampling>(config.strategy);
        samples = sample_directions_aabb(p.position, target_box, a.count, a.seed, p.original_vertex_id);
      }
      dist[i] = min_distance_for_point(*target.bvh, p.position, samples, config.culling, init_tmax, &local);
    }
    chunk_stats[chunk] = local;
  });
  if (stats) {
    for (const auto& s : chunk_stats) *stats += s;
  }
  return dist;
}

DirectionalResult directional_hausdorff(const PenetrationPointSet& sources,
                                        const PenetrationSurface& target, const HdistConfig& config) {
  DirectionalResult r;
  const std::vector<double> dist = per_point_distances(sources, target, config, &r.stats);
  // Ascending source order with a strict comparison leaves ties on the smallest id.
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (std::isinf(dist[i])) {
      ++r.unresolved_points;
      continue;
    }
    if (!r.witness || dist[i] > r.h) {
      r.h = dist[i];
      r.witness = sources.points[i].original_vertex_id;
    }
  }
  return r;
}

PenetrationRun run_penetration_depth(const TriangleMesh& mesh_a, const TriangleMesh& mesh_b,
                                     const HdistConfig& config, const Vec3& pip_axis) {
  validate_strategy(config.strategy);
  if (!check_closed(mesh_a)) throw MeshError("mesh A is not closed");
  if (!check_closed(mesh_b)) throw MeshError("mesh B is not closed");

  PenetrationRun run;
  auto t0 = std::chrono::steady_clock::now();
  const Bvh bvh_a = Bvh::build(mesh_a);
  const Bvh bvh_b = Bvh::build(mesh_b);
  const PenetrationPointSet points_a =
      extract_penetration_points(bvh_b, mesh_a, ObjectTag::A, pip_axis, &run.pip_stats);
  const PenetrationPointSet points_b =
      extract_penetration_points(bvh_a, mesh_b, ObjectTag::B, pip_axis, &run.pip_stats);
  run.timings.pip_ms = elapsed_ms(t0);

  t0 = std::chrono::steady_clock::now();
  run.surface_a = build_penetration_surface(mesh_a, points_a);
  run.surface_b = build_penetration_surface(mesh_b, points_b);
  run.timings.psg_ms = elapsed_ms(t0);

  HdistResult& res = run.result;
  if (run.surface_a.point_set.empty() || run.surface_b.point_set.empty()) {
    res.status = DepthStatus::NoOverlap;
    return run;
  }

  t0 = std::chrono::steady_clock::now();
  const DirectionalResult ab = directional_hausdorff(run.surface_a.point_set, run.surface_b, config);
  const DirectionalResult ba = directional_hausdorff(run.surface_b.point_set, run.surface_a, config);
  run.timings.hdist_ms = elapsed_ms(t0);

  res.h_ab = ab.h;
  res.h_ba = ba.h;
  res.depth = std::max(ab.h, ba.h);
  res.witness_ab = ab.witness;
  res.witness_ba = ba.witness;
  res.stats = ab.stats;
  res.stats += ba.stats;
  res.unresolved_points = ab.unresolved_points + ba.unresolved_points;
  return run;
}

HdistResult penetration_depth(const TriangleMesh& mesh_a, const TriangleMesh& mesh_b,
                              const HdistConfig& config, const Vec3& pip_axis) {
  return run_penetration_depth(mesh_a, mesh_b, config, pip_axis).result;
}

}  // namespace rtpd
