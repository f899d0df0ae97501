#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rtpd/mesh.hpp"

namespace rtpd {

/// Ray with a unit direction. Hits are reported for t in (0, t_max].
struct Ray {
  Vec3 origin;
  Vec3 direction;
  double t_max = kInfinity;
};

struct Hit {
  double t = kInfinity;
  std::uint32_t triangle_id = 0;
};

struct TraversalStats {
  std::uint64_t node_visits = 0;
  std::uint64_t triangle_tests = 0;
  std::uint64_t rays_cast = 0;

  TraversalStats& operator+=(const TraversalStats& o) {
    node_visits += o.node_visits;
    triangle_tests += o.triangle_tests;
    rays_cast += o.rays_cast;
    return *this;
  }
  bool operator==(const TraversalStats&) const = default;
};

/// Per-ray shear/scale transform for the watertight triangle test. Computing it
/// once per ray keeps the per-triangle cost down.
class RayShear {
 public:
  explicit RayShear(const Ray& ray);

  /// Parametric distance of the hit in (0, t_max], or nullopt. Points on a
  /// shared edge or vertex are assigned to exactly one of the triangles that
  /// meet there, so closed surfaces are crossed exactly once per sheet.
  std::optional<double> intersect(const Vec3& v0, const Vec3& v1, const Vec3& v2) const;

  /// True when the origin lies on the closed triangle (hit at exactly t = 0).
  bool touches_origin(const Vec3& v0, const Vec3& v1, const Vec3& v2) const;

 private:

  Vec3 origin_;
  double t_max_;
  int kx_, ky_, kz_;
  double sx_, sy_, sz_;
};

std::optional<double> intersect_triangle(const Ray& ray, const Vec3& v0, const Vec3& v1,
                                         const Vec3& v2);

/// Binary BVH over a triangle set, built from Morton-sorted centroids.
/// Immutable once built; queries are safe from any number of threads.
class Bvh {
 public:
  struct Node {
    Aabb bounds;
    std::uint32_t left = 0;   // child node indices, internal nodes only
    std::uint32_t right = 0;
    std::uint32_t first = 0;  // offset into the primitive order, leaves only
    std::uint32_t count = 0;  // > 0 marks a leaf
    bool is_leaf() const { return count > 0; }
  };

  static constexpr std::uint32_t kMaxLeafSize = 4;

  /// Throws std::invalid_argument for an empty triangle set.
  static Bvh build(std::span<const Vec3> vertices, std::span<const Triangle> triangles);
  static Bvh build(const TriangleMesh& mesh) { return build(mesh.vertices, mesh.triangles); }

  std::optional<Hit> closest_hit(const Ray& ray, TraversalStats* stats = nullptr) const;
  std::size_t count_hits(const Ray& ray, TraversalStats* stats = nullptr) const;
  /// Whether `ray.origin` lies exactly on some triangle, as seen by the
  /// watertight test along `ray.direction`. Triangles parallel to it are skipped.
  bool touches(const Ray& ray, TraversalStats* stats = nullptr) const;

  std::size_t triangle_count() const { return order_.size(); }
  std::span<const Node> nodes() const { return nodes_; }
  /// Original triangle ids in leaf (Morton) order.
  std::span<const std::uint32_t> primitive_order() const { return order_; }
  const Aabb& bounds() const { return nodes_.front().bounds; }
  /// Corner positions of an original triangle id.
  const std::array<Vec3, 3>& triangle(std::uint32_t id) const { return by_id_[id]; }

  /// Checks containment and the permutation invariant; throws std::logic_error.
  void validate() const;
  void dump(std::ostream& out, int max_depth = 64) const;

 private:
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
  std::vector<std::array<Vec3, 3>> sorted_;  // triangle corners in leaf order
  std::vector<std::array<Vec3, 3>> by_id_;
};

/// 30-bit Morton code of a point already normalised to [0, 1]^3.
std::uint32_t morton_code(const Vec3& unit_point);

}  // namespace rtpd
