#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rtpd/accel.hpp"

namespace rtpd {

enum class ObjectTag { A, B };

struct PenetrationPoint {
  std::uint32_t original_vertex_id = 0;
  Vec3 position;
  /// Shorter of the two PIP first-hit distances; bounds the distance from the
  /// point to the other object's surface from above.
  double d_pip = 0.0;
};

struct PenetrationPointSet {
  ObjectTag source = ObjectTag::A;
  std::vector<PenetrationPoint> points;  // ascending original_vertex_id
  std::vector<bool> inside_flags;        // one per source vertex

  bool empty() const { return points.empty(); }
};

struct OneWayResult {
  bool odd = false;
  std::optional<double> first_hit;
};

struct TwoWayResult {
  bool inside = false;
  std::optional<double> d_pip;
};

/// Parity of the crossing count along `direction` plus the nearest crossing.
OneWayResult pip_one_way(const Bvh& bvh, const Vec3& point, const Vec3& direction,
                         TraversalStats* stats = nullptr);

/// Inside only if both `axis_direction` and its opposite cross an odd number
/// of times. Points exactly on the surface therefore land outside.
TwoWayResult pip_two_way(const Bvh& bvh, const Vec3& point, const Vec3& axis_direction,
                         TraversalStats* stats = nullptr);

/// Classifies every vertex of `source_mesh` against the closed mesh behind
/// `bvh_other`. Runs in parallel; the result does not depend on thread count.
PenetrationPointSet extract_penetration_points(const Bvh& bvh_other, const TriangleMesh& source_mesh,
                                               ObjectTag source, const Vec3& axis_direction = {1, 0, 0},
                                               TraversalStats* stats = nullptr);

}  // namespace rtpd
