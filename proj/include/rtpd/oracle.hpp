#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rtpd/mesh.hpp"

// Brute-force reference implementations. Nothing here shares code with the
// BVH, the watertight intersector or the sampling pipeline.
namespace rtpd::oracle {

enum class Location { Inside, Outside, OnSurface };

struct OracleVerdict {
  Location location = Location::Outside;
  bool used_perturbation = false;
};

class OracleIndeterminate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kOnSurfaceDistance = 1e-9;
inline constexpr double kGrazingTolerance = 1e-12;
inline constexpr int kMaxRetries = 16;

/// Parity point-in-polyhedron test by linear scan. Rays that pass within the
/// grazing tolerance of an edge are re-cast in a fresh random direction; the
/// random stream is keyed on the point so results do not depend on call order.
class BrutePip {
 public:
  explicit BrutePip(const TriangleMesh& mesh);

  /// Throws OracleIndeterminate when every retry grazes.
  OracleVerdict classify(const Vec3& point) const;

  /// Exact distance from `point` to the nearest triangle.
  double distance_to_surface(const Vec3& point) const;

 private:
  enum class Cast { Even, Odd, Ambiguous };
  Cast cast(const Vec3& origin, const Vec3& dir) const;

  std::vector<std::array<Vec3, 3>> tris_;
  std::vector<Aabb> boxes_;
};

OracleVerdict brute_pip(const TriangleMesh& mesh, const Vec3& point);

/// Verdicts for many points, evaluated in parallel.
std::vector<OracleVerdict> brute_pip_all(const TriangleMesh& mesh, std::span<const Vec3> points);

/// Exact Euclidean distance to the closed triangle; degenerate triangles are
/// treated as their longest segment or point.
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// h(A, B) = max_a min_b |a - b| by double loop. Throws on empty input.
double brute_hausdorff_vertices(std::span<const Vec3> points_a, std::span<const Vec3> points_b);

/// Per-point min_b |a - b|.
std::vector<double> brute_nearest_vertex_distances(std::span<const Vec3> points,
                                                   std::span<const Vec3> targets);

/// max over points of the exact distance to the triangle set.
double brute_point_surface_h(std::span<const Vec3> points, std::span<const Vec3> vertices,
                             std::span<const Triangle> triangles);

std::vector<double> brute_point_surface_distances(std::span<const Vec3> points,
                                                  std::span<const Vec3> vertices,
                                                  std::span<const Triangle> triangles);

}  // namespace rtpd::oracle
