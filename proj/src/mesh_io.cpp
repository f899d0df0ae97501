#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "rtpd/mesh.hpp"

namespace rtpd {
namespace {

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

template <typename Int>
bool parse_int(std::string_view tok, Int& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

MeshFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".obj") return MeshFormat::Obj;
  if (ext == ".ply") return MeshFormat::PlyAscii;
  throw MeshError(path.string() + ": unrecognised mesh extension '" + ext + "' (expected .obj or .ply)");
}

TriangleMesh load_mesh(const std::filesystem::path& path) {
  return load_mesh(path, format_from_path(path));
}

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshError(path.string() + ": cannot open file");
  return format == MeshFormat::Obj ? read_obj(in, path.string()) : read_ply(in, path.string());
}

TriangleMesh read_obj(std::istream& in, const std::string& source_name) {
  TriangleMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  std::size_t face_no = 1;  // 1-based in messages, like OBJ indices
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0].front() == '#') continue;
    if (toks[0] == "v") {
      if (toks.size() < 4) throw MeshError(where(source_name, line_no) + "vertex needs 3 coordinates");
      Vec3 p;
      for (int k = 0; k < 3; ++k) {
        if (!parse_double(toks[k + 1], p[k])) {
          throw MeshError(where(source_name, line_no) + "bad vertex coordinate '" +
                          std::string(toks[k + 1]) + "'");
        }
      }
      mesh.vertices.push_back(p);
    } else if (toks[0] == "f") {
      if (toks.size() != 4) {
        throw MeshError(where(source_name, line_no) + "face " + std::to_string(face_no) + " has " +
                        std::to_string(toks.size() - 1) + " vertices; only triangles are supported");
      }
      Triangle tri{};
      for (int k = 0; k < 3; ++k) {
        std::string_view tok = toks[k + 1];
        tok = tok.substr(0, tok.find('/'));
        long long idx = 0;
        if (!parse_int(tok, idx) || idx == 0) {
          throw MeshError(where(source_name, line_no) + "bad face index '" + std::string(toks[k + 1]) + "'");
        }
        const long long n = static_cast<long long>(mesh.vertices.size());
        const long long zero_based = idx > 0 ? idx - 1 : n + idx;
        if (zero_based < 0 || zero_based >= n) {
          throw MeshError(where(source_name, line_no) + "face " + std::to_string(face_no) +
                          " references vertex " + std::to_string(idx) + " but only " +
                          std::to_string(n) + " vertices are defined");
        }
        tri[k] = static_cast<std::uint32_t>(zero_based);
      }
      if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
        throw MeshError(where(source_name, line_no) + "face " + std::to_string(face_no) +
                        " is degenerate (repeated vertex index)");
      }
      mesh.triangles.push_back(tri);
      ++face_no;
    }
    // vt, vn, o, g, s, usemtl, mtllib and friends carry nothing we use.
  }
  try {
    validate(mesh);
  } catch (const MeshError& e) {
    throw MeshError(source_name + ": " + e.what());
  }
  return mesh;
}

TriangleMesh read_ply(std::istream& in, const std::string& source_name) {
  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> props;
    bool has_list = false;
  };
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || split_ws(line).empty() || split_ws(line)[0] != "ply") {
    throw MeshError(where(source_name, 1) + "missing 'ply' magic");
  }
  ++line_no;
  std::vector<Element> elements;
  bool ascii = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "format") {
      if (toks.size() < 2 || toks[1] != "ascii") {
        throw MeshError(where(source_name, line_no) + "only ASCII PLY is supported");
      }
      ascii = true;
    } else if (toks[0] == "element") {
      if (toks.size() != 3) throw MeshError(where(source_name, line_no) + "malformed element line");
      Element e;
      e.name = std::string(toks[1]);
      if (!parse_int(toks[2], e.count)) throw MeshError(where(source_name, line_no) + "bad element count");
      elements.push_back(std::move(e));
    } else if (toks[0] == "property") {
      if (elements.empty()) throw MeshError(where(source_name, line_no) + "property before element");
      if (toks.size() >= 2 && toks[1] == "list") {
        elements.back().has_list = true;
        elements.back().props.emplace_back(toks.back());
      } else if (toks.size() == 3) {
        elements.back().props.emplace_back(toks[2]);
      } else {
        throw MeshError(where(source_name, line_no) + "malformed property line");
      }
    } else if (toks[0] == "end_header") {
      break;
    }
  }
  if (!ascii) throw MeshError(source_name + ": PLY header lacks 'format ascii'");

  TriangleMesh mesh;
  for (const Element& e : elements) {
    int ix = -1, iy = -1, iz = -1;
    if (e.name == "vertex") {
      for (std::size_t p = 0; p < e.props.size(); ++p) {
        if (e.props[p] == "x") ix = static_cast<int>(p);
        if (e.props[p] == "y") iy = static_cast<int>(p);
        if (e.props[p] == "z") iz = static_cast<int>(p);
      }
      if (ix < 0 || iy < 0 || iz < 0) throw MeshError(source_name + ": vertex element lacks x/y/z");
      mesh.vertices.reserve(e.count);
    }
    for (std::size_t r = 0; r < e.count; ++r) {
      if (!std::getline(in, line)) {
        throw MeshError(source_name + ": unexpected end of file in element '" + e.name + "'");
      }
      ++line_no;
      const auto toks = split_ws(line);
      if (e.name == "vertex") {
        if (toks.size() < e.props.size()) {
          throw MeshError(where(source_name, line_no) + "vertex row has too few values");
        }
        Vec3 p;
        const int idx[3] = {ix, iy, iz};
        for (int k = 0; k < 3; ++k) {
          if (!parse_double(toks[static_cast<std::size_t>(idx[k])], p[k])) {
            throw MeshError(where(source_name, line_no) + "bad vertex coordinate");
          }
        }
        mesh.vertices.push_back(p);
      } else if (e.name == "face") {
        std::size_t n = 0;
        if (toks.empty() || !parse_int(toks[0], n)) {
          throw MeshError(where(source_name, line_no) + "bad face row");
        }
        if (n != 3) {
          throw MeshError(where(source_name, line_no) + "face " + std::to_string(r + 1) + " has " +
                          std::to_string(n) + " vertices; only triangles are supported");
        }
        if (toks.size() < 4) throw MeshError(where(source_name, line_no) + "face row too short");
        Triangle tri{};
        for (int k = 0; k < 3; ++k) {
          long long idx = 0;
          if (!parse_int(toks[static_cast<std::size_t>(k) + 1], idx) || idx < 0) {
            throw MeshError(where(source_name, line_no) + "bad face index");
          }
          if (static_cast<std::size_t>(idx) >= mesh.vertices.size()) {
            throw MeshError(where(source_name, line_no) + "face " + std::to_string(r + 1) +
                            " references vertex " + std::to_string(idx) + " but only " +
                            std::to_string(mesh.vertices.size()) + " vertices are defined");
          }
          tri[k] = static_cast<std::uint32_t>(idx);
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
          throw MeshError(where(source_name, line_no) + "face " + std::to_string(r + 1) +
                          " is degenerate (repeated vertex index)");
        }
        mesh.triangles.push_back(tri);
      }
    }
  }
  try {
    validate(mesh);
  } catch (const MeshError& e) {
    throw MeshError(source_name + ": " + e.what());
  }
  return mesh;
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  std::string buf;
  for (const Vec3& v : mesh.vertices) {
    buf = "v ";
    append_double(buf, v.x);
    buf += ' ';
    append_double(buf, v.y);
    buf += ' ';
    append_double(buf, v.z);
    buf += '\n';
    out << buf;
  }
  for (const Triangle& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

void write_ply(std::ostream& out, const TriangleMesh& mesh) {
  out << "ply\nformat ascii 1.0\n"
      << "element vertex " << mesh.vertices.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "element face " << mesh.triangles.size() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  std::string buf;
  for (const Vec3& v : mesh.vertices) {
    buf.clear();
    append_double(buf, v.x);
    buf += ' ';
    append_double(buf, v.y);
    buf += ' ';
    append_double(buf, v.z);
    buf += '\n';
    out << buf;
  }
  for (const Triangle& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void save_mesh(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MeshError(path.string() + ": cannot open for writing");
  if (format_from_path(path) == MeshFormat::Obj) {
    write_obj(out, mesh);
  } else {
    write_ply(out, mesh);
  }
  if (!out) throw MeshError(path.string() + ": write failed");
}

}  // namespace rtpd
