#include "rtpd/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <tuple>
#include <unordered_map>

namespace rtpd::shapes {
namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

TriangleMesh refine(const TriangleMesh& mesh, bool project_to_sphere) {
  TriangleMesh out;
  out.vertices = mesh.vertices;
  out.triangles.reserve(mesh.triangles.size() * 4);
  std::unordered_map<std::uint64_t, std::uint32_t> midpoints;
  auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
    const auto key = edge_key(a, b);
    if (auto it = midpoints.find(key); it != midpoints.end()) return it->second;
    Vec3 m = (out.vertices[a] + out.vertices[b]) * 0.5;
    if (project_to_sphere) m = normalize(m);
    const auto idx = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.push_back(m);
    midpoints.emplace(key, idx);
    return idx;
  };
  for (const Triangle& t : mesh.triangles) {
    const auto ab = midpoint(t[0], t[1]);
    const auto bc = midpoint(t[1], t[2]);
    const auto ca = midpoint(t[2], t[0]);
    out.triangles.push_back({t[0], ab, ca});
    out.triangles.push_back({t[1], bc, ab});
    out.triangles.push_back({t[2], ca, bc});
    out.triangles.push_back({ab, bc, ca});
  }
  return out;
}

TriangleMesh unit_icosphere(int subdivisions) {
  const double phi = std::numbers::phi;
  TriangleMesh m;
  m.vertices = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (Vec3& v : m.vertices) v = normalize(v);
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                 {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                 {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                 {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int i = 0; i < subdivisions; ++i) m = refine(m, true);
  return m;
}

}  // namespace

TriangleMesh icosphere(int subdivisions, double radius, const Vec3& center) {
  TriangleMesh m = unit_icosphere(subdivisions);
  for (Vec3& v : m.vertices) v = center + v * radius;
  return m;
}

TriangleMesh box(int n, const Vec3& lo, const Vec3& hi) {
  if (n < 1) throw std::invalid_argument("box resolution must be >= 1");
  TriangleMesh m;
  std::map<std::tuple<int, int, int>, std::uint32_t> index;
  auto vertex = [&](int i, int j, int k) {
    const auto key = std::make_tuple(i, j, k);
    if (auto it = index.find(key); it != index.end()) return it->second;
    const double fx = static_cast<double>(i) / n;
    const double fy = static_cast<double>(j) / n;
    const double fz = static_cast<double>(k) / n;
    const auto idx = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.push_back({lo.x + (hi.x - lo.x) * fx, lo.y + (hi.y - lo.y) * fy, lo.z + (hi.z - lo.z) * fz});
    index.emplace(key, idx);
    return idx;
  };
  // Each face is parametrised by (u, v) with u x v pointing outward.
  auto grid_point = [n](int face, int u, int v) -> std::tuple<int, int, int> {
    switch (face) {
      case 0: return {n, u, v};      // +x: u=y, v=z
      case 1: return {0, v, u};      // -x
      case 2: return {v, n, u};      // +y: u=z, v=x
      case 3: return {u, 0, v};      // -y
      case 4: return {u, v, n};      // +z: u=x, v=y
      default: return {v, u, 0};     // -z
    }
  };
  for (int face = 0; face < 6; ++face) {
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        auto id = [&](int du, int dv) {
          auto [i, j, k] = grid_point(face, u + du, v + dv);
          return vertex(i, j, k);
        };
        const auto a = id(0, 0), b = id(1, 0), c = id(1, 1), d = id(0, 1);
        m.triangles.push_back({a, b, c});
        m.triangles.push_back({a, c, d});
      }
    }
  }
  return m;
}

TriangleMesh tetrahedron() {
  TriangleMesh m;
  m.vertices = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  m.triangles = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return m;
}

TriangleMesh subdivide(const TriangleMesh& mesh) { return refine(mesh, false); }

TriangleMesh blob(int subdivisions, std::uint64_t seed) {
  TriangleMesh m = unit_icosphere(subdivisions);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  struct Bump {
    Vec3 dir;
    double freq;
    double phase;
    double amp;
  };
  std::vector<Bump> bumps;
  for (int i = 0; i < 6; ++i) {
    Vec3 d{unit(rng), unit(rng), unit(rng)};
    d = normalize(d);
    bumps.push_back({d, 2.0 + 1.5 * i, std::numbers::pi * unit(rng), 0.12 / (1.0 + 0.6 * i)});
  }
  // Tangential jitter up to a fifth of the local edge length keeps the
  // radial projection injective, so the surface stays embedded.
  const double edge = 1.1 / std::pow(2.0, subdivisions);
  for (Vec3& v : m.vertices) {
    Vec3 jitter{unit(rng), unit(rng), unit(rng)};
    jitter = jitter - v * dot(jitter, v);
    Vec3 dir = normalize(v + jitter * (0.2 * edge));
    double r = 1.0;
    for (const Bump& b : bumps) r += b.amp * std::sin(b.freq * dot(dir, b.dir) + b.phase);
    v = dir * r;
  }
  return m;
}

}  // namespace rtpd::shapes
