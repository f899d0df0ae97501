#pragma once

#include <cstdint>

#include "rtpd/mesh.hpp"

// Procedural closed meshes used by the benchmark scenes and tests.
namespace rtpd::shapes {

/// Geodesic sphere: icosahedron refined `subdivisions` times (20 * 4^k triangles).
TriangleMesh icosphere(int subdivisions, double radius = 1.0, const Vec3& center = {});

/// Cube [lo, hi]^3 with every face split into an n x n grid of quads (12 n^2 triangles).
TriangleMesh box(int n, const Vec3& lo = {0, 0, 0}, const Vec3& hi = {1, 1, 1});

TriangleMesh tetrahedron();

/// 1-to-4 midpoint refinement, positions stay on the original faces.
TriangleMesh subdivide(const TriangleMesh& mesh);

/// Non-convex star-shaped blob with irregular triangulation: an icosphere whose
/// vertices are jittered tangentially and displaced radially by a sum of
/// low-frequency bumps. Stands in for a scanned model in the benchmarks.
TriangleMesh blob(int subdivisions, std::uint64_t seed = 7);

}  // namespace rtpd::shapes
