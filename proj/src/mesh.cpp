#include "rtpd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rtpd {

Aabb Aabb::of_triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
  Aabb box;
  box.extend(a);
  box.extend(b);
  box.extend(c);
  return box;
}

void Aabb::extend(const Vec3& p) {
  min = rtpd::min(min, p);
  max = rtpd::max(max, p);
}

void Aabb::extend(const Aabb& b) {
  min = rtpd::min(min, b.min);
  max = rtpd::max(max, b.max);
}

bool Aabb::contains(const Vec3& p, double pad) const {
  return p.x >= min.x - pad && p.x <= max.x + pad && p.y >= min.y - pad && p.y <= max.y + pad &&
         p.z >= min.z - pad && p.z <= max.z + pad;
}

bool Aabb::contains(const Aabb& b) const {
  return b.min.x >= min.x && b.min.y >= min.y && b.min.z >= min.z && b.max.x <= max.x &&
         b.max.y <= max.y && b.max.z <= max.z;
}

Aabb Aabb::inflated(double pad) const {
  Aabb out = *this;
  out.min = out.min - Vec3{pad, pad, pad};
  out.max = out.max + Vec3{pad, pad, pad};
  return out;
}

Aabb TriangleMesh::bounds() const {
  Aabb box;
  for (const Vec3& v : vertices) box.extend(v);
  return box;
}

Axis parse_axis(const std::string& name) {
  if (name == "x" || name == "X") return Axis::X;
  if (name == "y" || name == "Y") return Axis::Y;
  if (name == "z" || name == "Z") return Axis::Z;
  throw std::invalid_argument("unknown axis '" + name + "' (expected x, y or z)");
}

const char* axis_name(Axis axis) {
  switch (axis) {
    case Axis::X:
      return "x";
    case Axis::Y:
      return "y";
    case Axis::Z:
      return "z";
  }
  return "?";
}

Vec3 axis_vector(Axis axis) {
  Vec3 v;
  v[static_cast<std::size_t>(axis)] = 1.0;
  return v;
}

void validate(const TriangleMesh& mesh) {
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (!is_finite(mesh.vertices[i])) {
      throw MeshError("vertex " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
  const auto n = mesh.vertices.size();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    for (std::uint32_t idx : tri) {
      if (idx >= n) {
        throw MeshError("triangle " + std::to_string(t) + " references vertex " +
                        std::to_string(idx) + " but the mesh has " + std::to_string(n) +
                        " vertices");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw MeshError("triangle " + std::to_string(t) + " is degenerate (repeated vertex index)");
    }
  }
}

bool check_closed(const TriangleMesh& mesh) {
  if (mesh.triangles.empty()) return false;
  std::vector<std::uint64_t> edges;
  edges.reserve(mesh.triangles.size() * 3);
  for (const Triangle& tri : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      std::uint64_t a = tri[k];
      std::uint64_t b = tri[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.push_back((a << 32) | b);
    }
  }
  std::sort(edges.begin(), edges.end());
  std::size_t i = 0;
  while (i < edges.size()) {
    std::size_t j = i;
    while (j < edges.size() && edges[j] == edges[i]) ++j;
    if (j - i != 2) return false;
    i = j;
  }
  return true;
}

TriangleMesh translated(const TriangleMesh& mesh, const Vec3& offset) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v = v + offset;
  return out;
}

Vec3 overlap_translation(const TriangleMesh& mesh, double ratio, Axis axis) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("overlap ratio must lie in (0, 1]");
  }
  const auto a = static_cast<std::size_t>(axis);
  const double extent = mesh.bounds().extent()[a];
  if (!(extent > 0.0)) {
    throw MeshError(std::string("mesh has zero extent along axis ") + axis_name(axis));
  }
  Vec3 offset;
  offset[a] = (1.0 - ratio) * extent;
  return offset;
}

std::pair<TriangleMesh, TriangleMesh> make_overlap_scene(const TriangleMesh& mesh, double ratio,
                                                         Axis axis) {
  const Vec3 offset = overlap_translation(mesh, ratio, axis);
  return {mesh, translated(mesh, offset)};
}

}  // namespace rtpd
