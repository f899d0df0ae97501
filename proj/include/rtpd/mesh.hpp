#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rtpd/vec3.hpp"

namespace rtpd {

using Triangle = std::array<std::uint32_t, 3>;

/// Axis-aligned box. A default-constructed box is empty (min > max) and
/// becomes valid after the first extend().
struct Aabb {
  Vec3 min{kInfinity, kInfinity, kInfinity};
  Vec3 max{-kInfinity, -kInfinity, -kInfinity};

  static Aabb of_triangle(const Vec3& a, const Vec3& b, const Vec3& c);

  bool empty() const { return min.x > max.x || min.y > max.y || min.z > max.z; }
  void extend(const Vec3& p);
  void extend(const Aabb& b);
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return (min + max) * 0.5; }
  bool contains(const Vec3& p, double pad = 0.0) const;
  bool contains(const Aabb& b) const;
  Aabb inflated(double pad) const;
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
  Aabb bounds() const;
};

enum class Axis { X = 0, Y = 1, Z = 2 };

Axis parse_axis(const std::string& name);
const char* axis_name(Axis axis);
Vec3 axis_vector(Axis axis);

/// Throws MeshError naming the first offending vertex or triangle.
void validate(const TriangleMesh& mesh);

/// True iff every undirected edge is used by exactly two triangles.
bool check_closed(const TriangleMesh& mesh);

TriangleMesh translated(const TriangleMesh& mesh, const Vec3& offset);

/// B is A shifted along `axis` so the AABB overlap along that axis is
/// `ratio` times A's extent.
std::pair<TriangleMesh, TriangleMesh> make_overlap_scene(const TriangleMesh& mesh, double ratio,
                                                         Axis axis);
Vec3 overlap_translation(const TriangleMesh& mesh, double ratio, Axis axis);

// ---- file formats ----

enum class MeshFormat { Obj, PlyAscii };

MeshFormat format_from_path(const std::filesystem::path& path);

TriangleMesh load_mesh(const std::filesystem::path& path);
TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriangleMesh read_obj(std::istream& in, const std::string& source_name = "<stream>");
TriangleMesh read_ply(std::istream& in, const std::string& source_name = "<stream>");

/// Coordinates are written in shortest round-trip form, so reloading is bit-exact.
void write_obj(std::ostream& out, const TriangleMesh& mesh);
void write_ply(std::ostream& out, const TriangleMesh& mesh);
void save_mesh(const std::filesystem::path& path, const TriangleMesh& mesh);

}  // namespace rtpd
