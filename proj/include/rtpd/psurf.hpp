#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rtpd/accel.hpp"
#include "rtpd/pip.hpp"

namespace rtpd {

/// Triangles of the source mesh with at least one flagged vertex, in the
/// original order, still indexing the original vertex list.
struct SurfaceTriangleList {
  std::vector<Triangle> triangles;
  std::vector<std::uint32_t> source_triangle_ids;
};

/// Original index -> compact index, or kAbsent.
struct LookupTable {
  static constexpr std::uint32_t kAbsent = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> map;
};

struct CompactedVertices {
  std::vector<Vec3> vertices;
  LookupTable lookup;
};

class SurfaceConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Sub-mesh of one object that lies (at least partly) inside the other.
/// `vertices` also holds the rim vertices that are outside but needed by the
/// surface triangles; only `point_set` members act as ray sources.
struct PenetrationSurface {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<std::uint32_t> source_triangle_ids;
  std::vector<std::uint32_t> source_vertex_ids;  // compact index -> original index
  PenetrationPointSet point_set;
  std::optional<Bvh> bvh;

  bool empty() const { return triangles.empty(); }
  Aabb bounds() const;
};

SurfaceTriangleList collect_penetration_triangles(const TriangleMesh& mesh,
                                                  const std::vector<bool>& inside_flags);

/// Sorted, duplicate-free vertex ids referenced by `list`.
std::vector<std::uint32_t> extract_unique_vertices(const SurfaceTriangleList& list);

CompactedVertices compact_vertices(const TriangleMesh& mesh, std::span<const std::uint32_t> ids);

/// Throws SurfaceConsistencyError if an index maps to kAbsent.
std::vector<Triangle> remap_triangles(const SurfaceTriangleList& list, const LookupTable& lookup);

PenetrationSurface build_penetration_surface(const TriangleMesh& mesh,
                                             const PenetrationPointSet& point_set);

/// Standalone mesh view of a surface, for export.
TriangleMesh to_mesh(const PenetrationSurface& surface);

}  // namespace rtpd
