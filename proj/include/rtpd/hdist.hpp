#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "rtpd/accel.hpp"
#include "rtpd/pip.hpp"
#include "rtpd/psurf.hpp"

namespace rtpd {

// ---- sampling strategies ----

/// Every stride-th vertex of the opposing surface, stride = floor(1 / rate).
struct VertexSampling {
  double rate = 0.01;
  std::uint64_t seed = 0;
};

/// Uniform directions on the unit sphere around each query point.
struct SphereSampling {
  std::uint32_t count = 64;
  std::uint64_t seed = 0;
};

/// Uniform points in the bounding box of the opposing surface.
struct AabbSampling {
  std::uint32_t count = 64;
  std::uint64_t seed = 0;
};

using SamplingStrategy = std::variant<VertexSampling, SphereSampling, AabbSampling>;

const char* strategy_name(const SamplingStrategy& s);
std::uint64_t strategy_seed(const SamplingStrategy& s);
void validate_strategy(const SamplingStrategy& s);

struct HdistConfig {
  SamplingStrategy strategy = VertexSampling{};
  bool culling = true;
  bool dpip_filter = true;
};

/// One ray to cast from a query point. `target_distance` is finite when the
/// ray aims at a point known to lie on the target surface; that distance is
/// itself an admissible upper bound even if the ray grazes past.
struct RaySample {
  Vec3 direction;
  double target_distance = kInfinity;
};

/// Stride selection over `targets` starting at seed mod stride. With `dpip`,
/// vertices farther than dpip are dropped; if none survive, the nearest
/// selected vertex is kept.
std::vector<RaySample> sample_directions_vertex(const Vec3& query, std::span<const Vec3> targets,
                                                double rate, std::uint64_t seed,
                                                std::optional<double> dpip = std::nullopt);

/// `stream` separates per-point sequences (callers pass the source vertex id).
std::vector<RaySample> sample_directions_sphere(std::uint32_t count, std::uint64_t seed,
                                                std::uint64_t stream = 0);

std::vector<RaySample> sample_directions_aabb(const Vec3& query, const Aabb& target_box,
                                              std::uint32_t count, std::uint64_t seed,
                                              std::uint64_t stream = 0);

std::size_t vertex_sampling_stride(double rate);

/// Smallest hit distance over the samples, casting them in order. With
/// culling each ray is clipped to the best distance so far. Returns +inf when
/// nothing was found and `init_tmax` is infinite.
double min_distance_for_point(const Bvh& target, const Vec3& query, std::span<const RaySample> samples,
                              bool culling, double init_tmax, TraversalStats* stats = nullptr);

// ---- Hausdorff ----

struct DirectionalResult {
  double h = 0.0;
  std::optional<std::uint32_t> witness;  // original vertex id of the source
  TraversalStats stats;
  std::uint64_t unresolved_points = 0;   // sources whose rays all missed
};

/// h(X, Y): max over X's penetration points of their sampled distance to Y.
DirectionalResult directional_hausdorff(const PenetrationPointSet& sources,
                                        const PenetrationSurface& target, const HdistConfig& config);

/// Per-source distances in source order (used by diagnostics and tests).
std::vector<double> per_point_distances(const PenetrationPointSet& sources,
                                        const PenetrationSurface& target, const HdistConfig& config,
                                        TraversalStats* stats = nullptr);

enum class DepthStatus { Ok, NoOverlap };

struct HdistResult {
  double h_ab = 0.0;
  double h_ba = 0.0;
  double depth = 0.0;
  std::optional<std::uint32_t> witness_ab;
  std::optional<std::uint32_t> witness_ba;
  TraversalStats stats;
  std::uint64_t unresolved_points = 0;
  DepthStatus status = DepthStatus::Ok;
};

struct StageTimings {
  double pip_ms = 0.0;
  double psg_ms = 0.0;
  double hdist_ms = 0.0;
};

/// Everything the full pipeline produces, for reporting.
struct PenetrationRun {
  HdistResult result;
  PenetrationSurface surface_a;
  PenetrationSurface surface_b;
  TraversalStats pip_stats;
  StageTimings timings;
};

/// PIP both ways, penetration surfaces, then bidirectional sampled Hausdorff.
/// Throws MeshError if either mesh is not closed.
PenetrationRun run_penetration_depth(const TriangleMesh& mesh_a, const TriangleMesh& mesh_b,
                                     const HdistConfig& config, const Vec3& pip_axis = {1, 0, 0});

HdistResult penetration_depth(const TriangleMesh& mesh_a, const TriangleMesh& mesh_b,
                              const HdistConfig& config, const Vec3& pip_axis = {1, 0, 0});

}  // namespace rtpd
