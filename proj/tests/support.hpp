#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "rtpd/accel.hpp"
#include "rtpd/mesh.hpp"
#include "rtpd/shapes.hpp"

namespace rtpd::test {

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 d;
  do {
    d = {g(rng), g(rng), g(rng)};
  } while (length(d) < 1e-9);
  return normalize(d);
}

inline Vec3 random_in_box(std::mt19937_64& rng, const Aabb& box) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vec3 e = box.extent();
  return {box.min.x + e.x * u(rng), box.min.y + e.y * u(rng), box.min.z + e.z * u(rng)};
}

/// Closest hit by scanning every triangle with the same primitive test.
inline std::optional<Hit> scan_closest(const TriangleMesh& m, const Ray& ray) {
  const RayShear shear(ray);
  std::optional<Hit> best;
  for (std::uint32_t i = 0; i < m.triangles.size(); ++i) {
    const auto& t = m.triangles[i];
    const auto hit = shear.intersect(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
    if (hit && (!best || *hit < best->t)) best = Hit{*hit, i};
  }
  return best;
}

inline std::size_t scan_count(const TriangleMesh& m, const Ray& ray) {
  const RayShear shear(ray);
  std::size_t n = 0;
  for (const auto& t : m.triangles) {
    if (shear.intersect(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]])) ++n;
  }
  return n;
}

/// `count` triangles with corners scattered in the unit cube.
inline TriangleMesh random_soup(std::size_t count, std::uint64_t seed, double size = 0.2) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> s(-size, size);
  TriangleMesh m;
  for (std::size_t i = 0; i < count; ++i) {
    const Vec3 c{u(rng), u(rng), u(rng)};
    const auto base = static_cast<std::uint32_t>(m.vertices.size());
    for (int k = 0; k < 3; ++k) m.vertices.push_back(c + Vec3{s(rng), s(rng), s(rng)});
    m.triangles.push_back({base, base + 1, base + 2});
  }
  return m;
}

/// Two unit cubes offset by half a unit along x.
inline std::pair<TriangleMesh, TriangleMesh> two_cube_scene() {
  return make_overlap_scene(shapes::box(1), 0.5, Axis::X);
}

}  // namespace rtpd::test
