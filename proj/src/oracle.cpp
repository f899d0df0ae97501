#include "rtpd/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "rtpd/parallel.hpp"

namespace rtpd::oracle {
namespace {

double segment_distance_squared(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return length_squared(p - (a + ab * t));
}

std::uint64_t hash_point(const Vec3& p) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (double c : {p.x, p.y, p.z}) {
    h ^= std::bit_cast<std::uint64_t>(c);
    h *= 0x100000001b3ull;
    h ^= h >> 29;
  }
  return h;
}

}  // namespace

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 n = cross(ab, ac);
  const double scale = std::max({length_squared(ab), length_squared(ac), length_squared(c - b)});
  if (length_squared(n) <= 1e-24 * scale * scale) {
    // Zero-area triangle: the closed set is the union of its edges.
    return std::sqrt(std::min({segment_distance_squared(p, a, b), segment_distance_squared(p, b, c),
                               segment_distance_squared(p, c, a)}));
  }

  // Voronoi-region classification of the closest point.
  const Vec3 ap = p - a;
  const double d1 = dot(ab, ap);
  const double d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return length(ap);

  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp);
  const double d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return length(bp);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return length(p - (a + ab * v));
  }

  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp);
  const double d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return length(cp);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return length(p - (a + ac * w));
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return length(p - (b + (c - b) * w));
  }

  // Interior: distance to the supporting plane.
  return std::abs(dot(ap, n)) / length(n);
}

BrutePip::BrutePip(const TriangleMesh& mesh) {
  tris_.reserve(mesh.triangles.size());
  boxes_.reserve(mesh.triangles.size());
  for (const Triangle& t : mesh.triangles) {
    tris_.push_back({mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]});
    boxes_.push_back(Aabb::of_triangle(tris_.back()[0], tris_.back()[1], tris_.back()[2]));
  }
}

double BrutePip::distance_to_surface(const Vec3& point) const {
  double best = kInfinity;
  for (const auto& t : tris_) best = std::min(best, point_triangle_distance(point, t[0], t[1], t[2]));
  return best;
}

BrutePip::Cast BrutePip::cast(const Vec3& origin, const Vec3& dir) const {
  // Moller-Trumbore with a grazing band around every barycentric boundary.
  std::size_t crossings = 0;
  for (const auto& tri : tris_) {
    const Vec3 e1 = tri[1] - tri[0];
    const Vec3 e2 = tri[2] - tri[0];
    const Vec3 pvec = cross(dir, e2);
    const double det = dot(e1, pvec);
    const double scale = length(e1) * length(e2);
    if (std::abs(det) <= 1e-14 * scale) {
      // Ray parallel to the plane: only a ray lying in the plane could touch it.
      const Vec3 n = cross(e1, e2);
      const double n_len = length(n);
      if (n_len == 0.0) continue;  // zero-area triangles cannot change parity
      if (std::abs(dot(origin - tri[0], n)) / n_len < kOnSurfaceDistance) return Cast::Ambiguous;
      continue;
    }
    const double inv = 1.0 / det;
    const Vec3 s = origin - tri[0];
    const double u = dot(s, pvec) * inv;
    if (u < -kGrazingTolerance || u > 1.0 + kGrazingTolerance) continue;
    const Vec3 q = cross(s, e1);
    const double v = dot(dir, q) * inv;
    if (v < -kGrazingTolerance || u + v > 1.0 + kGrazingTolerance) continue;
    const double t = dot(e2, q) * inv;
    if (t <= 0.0) continue;
    const double w = 1.0 - u - v;
    if (u <= kGrazingTolerance || v <= kGrazingTolerance || w <= kGrazingTolerance) {
      return Cast::Ambiguous;
    }
    ++crossings;
  }
  return crossings % 2 == 1 ? Cast::Odd : Cast::Even;
}

OracleVerdict BrutePip::classify(const Vec3& point) const {
  for (std::size_t i = 0; i < tris_.size(); ++i) {
    if (!boxes_[i].contains(point, kOnSurfaceDistance)) continue;
    const auto& t = tris_[i];
    if (point_triangle_distance(point, t[0], t[1], t[2]) < kOnSurfaceDistance) {
      return {Location::OnSurface, false};
    }
  }

  std::mt19937_64 rng(hash_point(point));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 dir = normalize(Vec3{0.5377, 0.7411, 0.4023});
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    if (attempt > 0) {
      do {
        dir = Vec3{gauss(rng), gauss(rng), gauss(rng)};
      } while (length(dir) < 1e-6);
      dir = normalize(dir);
    }
    const Cast c = cast(point, dir);
    if (c == Cast::Ambiguous) continue;
    return {c == Cast::Odd ? Location::Inside : Location::Outside, attempt > 0};
  }
  throw OracleIndeterminate("brute-force PIP: every retry direction grazed an edge");
}

OracleVerdict brute_pip(const TriangleMesh& mesh, const Vec3& point) {
  return BrutePip(mesh).classify(point);
}

std::vector<OracleVerdict> brute_pip_all(const TriangleMesh& mesh, std::span<const Vec3> points) {
  const BrutePip pip(mesh);
  const Aabb box = mesh.bounds().inflated(kOnSurfaceDistance);
  std::vector<OracleVerdict> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    // Beyond the padded bounding box a point is trivially outside.
    if (!box.contains(points[i])) return;
    out[i] = pip.classify(points[i]);
  });
  return out;
}

double brute_hausdorff_vertices(std::span<const Vec3> points_a, std::span<const Vec3> points_b) {
  if (points_a.empty() || points_b.empty()) {
    throw std::invalid_argument("brute_hausdorff_vertices needs two non-empty point sets");
  }
  const auto nearest = brute_nearest_vertex_distances(points_a, points_b);
  return *std::max_element(nearest.begin(), nearest.end());
}

std::vector<double> brute_nearest_vertex_distances(std::span<const Vec3> points,
                                                   std::span<const Vec3> targets) {
  std::vector<double> out(points.size(), kInfinity);
  if (targets.empty()) return out;
  parallel_for(points.size(), [&](std::size_t i) {
    double best = kInfinity;
    for (const Vec3& b : targets) best = std::min(best, length_squared(points[i] - b));
    out[i] = std::sqrt(best);
  });
  return out;
}

std::vector<double> brute_point_surface_distances(std::span<const Vec3> points,
                                                  std::span<const Vec3> vertices,
                                                  std::span<const Triangle> triangles) {
  std::vector<double> out(points.size(), kInfinity);
  parallel_for(points.size(), [&](std::size_t i) {
    double best = kInfinity;
    for (const Triangle& t : triangles) {
      best = std::min(best, point_triangle_distance(points[i], vertices[t[0]], vertices[t[1]], vertices[t[2]]));
    }
    out[i] = best;
  });
  return out;
}

double brute_point_surface_h(std::span<const Vec3> points, std::span<const Vec3> vertices,
                             std::span<const Triangle> triangles) {
  if (points.empty() || triangles.empty()) {
    throw std::invalid_argument("brute_point_surface_h needs points and triangles");
  }
  const auto d = brute_point_surface_distances(points, vertices, triangles);
  return *std::max_element(d.begin(), d.end());
}

}  // namespace rtpd::oracle
