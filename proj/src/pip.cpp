#include "rtpd/pip.hpp"

#include <algorithm>

#include "rtpd/parallel.hpp"

namespace rtpd {

OneWayResult pip_one_way(const Bvh& bvh, const Vec3& point, const Vec3& direction,
                         TraversalStats* stats) {
  const Ray ray{point, direction, kInfinity};
  OneWayResult r;
  r.odd = bvh.count_hits(ray, stats) % 2 == 1;
  if (auto hit = bvh.closest_hit(ray, stats)) r.first_hit = hit->t;
  return r;
}

TwoWayResult pip_two_way(const Bvh& bvh, const Vec3& point, const Vec3& axis_direction,
                         TraversalStats* stats) {
  const OneWayResult forward = pip_one_way(bvh, point, axis_direction, stats);
  if (!forward.odd) return {};
  const OneWayResult backward = pip_one_way(bvh, point, -axis_direction, stats);
  if (!backward.odd) return {};
  // A point lying on the surface is not crossed by either ray; count it outside.
  if (bvh.touches({point, axis_direction, 0.0}, stats)) return {};
  // Odd parity implies at least one crossing in each direction.
  return {true, std::min(*forward.first_hit, *backward.first_hit)};
}

PenetrationPointSet extract_penetration_points(const Bvh& bvh_other, const TriangleMesh& source_mesh,
                                               ObjectTag source, const Vec3& axis_direction,
                                               TraversalStats* stats) {
  const std::size_t n = source_mesh.vertices.size();
  std::vector<TwoWayResult> results(n);
  std::vector<TraversalStats> chunk_stats(thread_count());
  const Aabb other_bounds = bvh_other.bounds();
  parallel_chunks(n, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    TraversalStats local;
    for (std::size_t i = begin; i < end; ++i) {
      const Vec3& p = source_mesh.vertices[i];
      // Outside the other object's box no ray can cross it an odd number of times.
      if (!other_bounds.contains(p)) continue;
      results[i] = pip_two_way(bvh_other, p, axis_direction, &local);
    }
    chunk_stats[chunk] = local;
  });

  PenetrationPointSet set;
  set.source = source;
  set.inside_flags.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!results[i].inside) continue;
    set.inside_flags[i] = true;
    set.points.push_back({static_cast<std::uint32_t>(i), source_mesh.vertices[i], *results[i].d_pip});
  }
  if (stats) {
    for (const auto& s : chunk_stats) *stats += s;
  }
  return set;
}

}  // namespace rtpd
