#include "rtpd/psurf.hpp"

#include <algorithm>
#include <string>

#include "rtpd/parallel.hpp"

namespace rtpd {

Aabb PenetrationSurface::bounds() const {
  Aabb box;
  for (const Vec3& v : vertices) box.extend(v);
  return box;
}

SurfaceTriangleList collect_penetration_triangles(const TriangleMesh& mesh,
                                                  const std::vector<bool>& inside_flags) {
  if (inside_flags.size() != mesh.vertices.size()) {
    throw std::invalid_argument("inside flag count does not match vertex count");
  }
  SurfaceTriangleList list;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    if (inside_flags[tri[0]] || inside_flags[tri[1]] || inside_flags[tri[2]]) {
      list.triangles.push_back(tri);
      list.source_triangle_ids.push_back(static_cast<std::uint32_t>(t));
    }
  }
  return list;
}

std::vector<std::uint32_t> extract_unique_vertices(const SurfaceTriangleList& list) {
  // Sort then collapse equal keys: the reduce-by-key formulation.
  std::vector<std::uint32_t> keys;
  keys.reserve(list.triangles.size() * 3);
  for (const Triangle& t : list.triangles) keys.insert(keys.end(), t.begin(), t.end());
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

CompactedVertices compact_vertices(const TriangleMesh& mesh, std::span<const std::uint32_t> ids) {
  CompactedVertices out;
  out.vertices.resize(ids.size());
  out.lookup.map.assign(mesh.vertices.size(), LookupTable::kAbsent);
  parallel_for(ids.size(), [&](std::size_t t) {
    out.vertices[t] = mesh.vertices[ids[t]];
    out.lookup.map[ids[t]] = static_cast<std::uint32_t>(t);
  });
  return out;
}

std::vector<Triangle> remap_triangles(const SurfaceTriangleList& list, const LookupTable& lookup) {
  std::vector<Triangle> out(list.triangles.size());
  parallel_for(list.triangles.size(), [&](std::size_t t) {
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t original = list.triangles[t][k];
      const std::uint32_t mapped =
          original < lookup.map.size() ? lookup.map[original] : LookupTable::kAbsent;
      if (mapped == LookupTable::kAbsent) {
        throw SurfaceConsistencyError("surface triangle " + std::to_string(t) +
                                      " references vertex " + std::to_string(original) +
                                      " that has no compact index");
      }
      out[t][k] = mapped;
    }
  });
  return out;
}

PenetrationSurface build_penetration_surface(const TriangleMesh& mesh,
                                             const PenetrationPointSet& point_set) {
  PenetrationSurface surface;
  surface.point_set.source = point_set.source;
  surface.point_set.inside_flags = point_set.inside_flags;
  if (point_set.empty()) return surface;

  SurfaceTriangleList list = collect_penetration_triangles(mesh, point_set.inside_flags);
  std::vector<std::uint32_t> ids = extract_unique_vertices(list);
  CompactedVertices compact = compact_vertices(mesh, ids);
  surface.triangles = remap_triangles(list, compact.lookup);
  surface.vertices = std::move(compact.vertices);
  surface.source_triangle_ids = std::move(list.source_triangle_ids);
  surface.source_vertex_ids = std::move(ids);

  // Inside vertices that no triangle uses are not part of the surface.
  for (const PenetrationPoint& p : point_set.points) {
    if (compact.lookup.map[p.original_vertex_id] != LookupTable::kAbsent) {
      surface.point_set.points.push_back(p);
    } else {
      surface.point_set.inside_flags[p.original_vertex_id] = false;
    }
  }
  if (!surface.triangles.empty()) surface.bvh = Bvh::build(surface.vertices, surface.triangles);
  return surface;
}

TriangleMesh to_mesh(const PenetrationSurface& surface) {
  return TriangleMesh{surface.vertices, surface.triangles};
}

}  // namespace rtpd
