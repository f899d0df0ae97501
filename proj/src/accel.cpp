#include "rtpd/accel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rtpd {
namespace {

constexpr double kGamma3 = 3.0 * std::numeric_limits<double>::epsilon() * 0.5 /
                           (1.0 - 3.0 * std::numeric_limits<double>::epsilon() * 0.5);

// Slab test against [0, t_max]. The far bound is widened by 2*gamma(3) so a
// triangle lying on a box face is never culled by rounding.
struct SlabRay {
  Vec3 origin;
  Vec3 inv;
  bool parallel[3];

  explicit SlabRay(const Ray& r) : origin(r.origin) {
    for (std::size_t a = 0; a < 3; ++a) {
      parallel[a] = r.direction[a] == 0.0;
      inv[a] = parallel[a] ? 0.0 : 1.0 / r.direction[a];
    }
  }

  bool hit(const Aabb& box, double t_max, double& t_enter) const {
    double t0 = 0.0;
    double t1 = t_max * (1.0 + 2.0 * kGamma3);
    for (std::size_t a = 0; a < 3; ++a) {
      if (parallel[a]) {
        if (origin[a] < box.min[a] || origin[a] > box.max[a]) return false;
        continue;
      }
      double tn = (box.min[a] - origin[a]) * inv[a];
      double tf = (box.max[a] - origin[a]) * inv[a];
      if (tn > tf) std::swap(tn, tf);
      tf *= 1.0 + 2.0 * kGamma3;
      t0 = std::max(t0, tn);
      t1 = std::min(t1, tf);
      if (t0 > t1) return false;
    }
    t_enter = t0;
    return true;
  }
};

std::uint32_t expand_bits(std::uint32_t v) {
  v = (v * 0x00010001u) & 0xFF0000FFu;
  v = (v * 0x00000101u) & 0x0F00F00Fu;
  v = (v * 0x00000011u) & 0xC30C30C3u;
  v = (v * 0x00000005u) & 0x49249249u;
  return v;
}

struct StackEntry {
  std::uint32_t node;
  double t_enter;
};

constexpr std::size_t kStackSize = 128;

}  // namespace

RayShear::RayShear(const Ray& ray) : origin_(ray.origin), t_max_(ray.t_max) {
  const Vec3& d = ray.direction;
  kz_ = 0;
  if (std::abs(d.y) > std::abs(d[static_cast<std::size_t>(kz_)])) kz_ = 1;
  if (std::abs(d.z) > std::abs(d[static_cast<std::size_t>(kz_)])) kz_ = 2;
  kx_ = (kz_ + 1) % 3;
  ky_ = (kx_ + 1) % 3;
  if (d[static_cast<std::size_t>(kz_)] < 0.0) std::swap(kx_, ky_);
  const double dz = d[static_cast<std::size_t>(kz_)];
  sx_ = d[static_cast<std::size_t>(kx_)] / dz;
  sy_ = d[static_cast<std::size_t>(ky_)] / dz;
  sz_ = 1.0 / dz;
}

std::optional<double> RayShear::intersect(const Vec3& v0, const Vec3& v1, const Vec3& v2) const {
  const auto kx = static_cast<std::size_t>(kx_);
  const auto ky = static_cast<std::size_t>(ky_);
  const auto kz = static_cast<std::size_t>(kz_);
  const Vec3 a = v0 - origin_;
  const Vec3 b = v1 - origin_;
  const Vec3 c = v2 - origin_;
  const double ax = a[kx] - sx_ * a[kz];
  const double ay = a[ky] - sy_ * a[kz];
  const double bx = b[kx] - sx_ * b[kz];
  const double by = b[ky] - sy_ * b[kz];
  const double cx = c[kx] - sx_ * c[kz];
  const double cy = c[ky] - sy_ * c[kz];

  // Edge functions for B->C, C->A, A->B evaluated at the projected origin.
  // Each depends only on its two endpoints, so a shared edge yields exactly
  // negated values in the two triangles that use it.
  const double u = cx * by - cy * bx;
  const double v = ax * cy - ay * cx;
  const double w = bx * ay - by * ax;
  if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return std::nullopt;
  const double det = u + v + w;
  if (det == 0.0) return std::nullopt;

  // Tie rule for points exactly on an edge: with the edge oriented so the
  // triangle lies on a fixed side, only "upper" (or rightward horizontal)
  // edges own their points. The neighbour sees the opposite direction.
  const double sign = det > 0.0 ? 1.0 : -1.0;
  auto owns = [sign](double ex, double ey) {
    ex *= sign;
    ey *= sign;
    return ey > 0.0 || (ey == 0.0 && ex > 0.0);
  };
  if (u == 0.0 && !owns(cx - bx, cy - by)) return std::nullopt;
  if (v == 0.0 && !owns(ax - cx, ay - cy)) return std::nullopt;
  if (w == 0.0 && !owns(bx - ax, by - ay)) return std::nullopt;

  const double t_num = u * (sz_ * a[kz]) + v * (sz_ * b[kz]) + w * (sz_ * c[kz]);
  const double t = t_num / det;
  if (!(t > 0.0 && t <= t_max_)) return std::nullopt;
  return t;
}

bool RayShear::touches_origin(const Vec3& v0, const Vec3& v1, const Vec3& v2) const {
  const auto kx = static_cast<std::size_t>(kx_);
  const auto ky = static_cast<std::size_t>(ky_);
  const auto kz = static_cast<std::size_t>(kz_);
  const Vec3 a = v0 - origin_;
  const Vec3 b = v1 - origin_;
  const Vec3 c = v2 - origin_;
  const double ax = a[kx] - sx_ * a[kz];
  const double ay = a[ky] - sy_ * a[kz];
  const double bx = b[kx] - sx_ * b[kz];
  const double by = b[ky] - sy_ * b[kz];
  const double cx = c[kx] - sx_ * c[kz];
  const double cy = c[ky] - sy_ * c[kz];
  const double u = cx * by - cy * bx;
  const double v = ax * cy - ay * cx;
  const double w = bx * ay - by * ax;
  if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return false;
  if (u + v + w == 0.0) return false;
  return u * (sz_ * a[kz]) + v * (sz_ * b[kz]) + w * (sz_ * c[kz]) == 0.0;
}

std::optional<double> intersect_triangle(const Ray& ray, const Vec3& v0, const Vec3& v1,
                                         const Vec3& v2) {
  return RayShear(ray).intersect(v0, v1, v2);
}

std::uint32_t morton_code(const Vec3& p) {
  auto quantise = [](double x) {
    const double s = std::clamp(x * 1024.0, 0.0, 1023.0);
    return static_cast<std::uint32_t>(s);
  };
  return (expand_bits(quantise(p.x)) << 2) | (expand_bits(quantise(p.y)) << 1) |
         expand_bits(quantise(p.z));
}

Bvh Bvh::build(std::span<const Vec3> vertices, std::span<const Triangle> triangles) {
  if (triangles.empty()) throw std::invalid_argument("cannot build a BVH over zero triangles");
  const auto n = static_cast<std::uint32_t>(triangles.size());

  Bvh bvh;
  bvh.by_id_.resize(n);
  Aabb scene;
  for (std::uint32_t i = 0; i < n; ++i) {
    const Triangle& t = triangles[i];
    bvh.by_id_[i] = {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
    for (const Vec3& p : bvh.by_id_[i]) scene.extend(p);
  }

  const Vec3 ext = scene.extent();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> keys(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto& c = bvh.by_id_[i];
    const Vec3 centroid = (c[0] + c[1] + c[2]) / 3.0;
    Vec3 unit;
    for (std::size_t a = 0; a < 3; ++a) {
      unit[a] = ext[a] > 0.0 ? (centroid[a] - scene.min[a]) / ext[a] : 0.0;
    }
    keys[i] = {morton_code(unit), i};
  }
  std::sort(keys.begin(), keys.end());

  bvh.order_.resize(n);
  bvh.sorted_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    bvh.order_[i] = keys[i].second;
    bvh.sorted_[i] = bvh.by_id_[keys[i].second];
  }

  // Binary radix tree over the sorted codes: each range splits where its
  // highest differing Morton bit flips. Children always follow their parent.
  bvh.nodes_.reserve(2 * static_cast<std::size_t>(n));
  auto emit = [&](auto&& self, std::uint32_t first, std::uint32_t last) -> std::uint32_t {
    const auto index = static_cast<std::uint32_t>(bvh.nodes_.size());
    bvh.nodes_.emplace_back();
    const std::uint32_t count = last - first;
    if (count <= kMaxLeafSize) {
      bvh.nodes_[index].first = first;
      bvh.nodes_[index].count = count;
      return index;
    }
    const std::uint32_t code_first = keys[first].first;
    const std::uint32_t code_last = keys[last - 1].first;
    std::uint32_t split = first + count / 2;
    if (code_first != code_last) {
      const int bit = 31 - std::countl_zero(code_first ^ code_last);
      const std::uint32_t mask = 1u << bit;
      const auto it = std::partition_point(keys.begin() + first, keys.begin() + last,
                                           [mask](const auto& k) { return (k.first & mask) == 0; });
      split = static_cast<std::uint32_t>(it - keys.begin());
    }
    const std::uint32_t left = self(self, first, split);
    const std::uint32_t right = self(self, split, last);
    bvh.nodes_[index].left = left;
    bvh.nodes_[index].right = right;
    return index;
  };
  emit(emit, 0, n);

  for (std::size_t i = bvh.nodes_.size(); i-- > 0;) {
    Node& node = bvh.nodes_[i];
    Aabb box;
    if (node.is_leaf()) {
      for (std::uint32_t p = node.first; p < node.first + node.count; ++p) {
        for (const Vec3& v : bvh.sorted_[p]) box.extend(v);
      }
    } else {
      box.extend(bvh.nodes_[node.left].bounds);
      box.extend(bvh.nodes_[node.right].bounds);
    }
    node.bounds = box;
  }
  return bvh;
}

std::optional<Hit> Bvh::closest_hit(const Ray& ray, TraversalStats* stats) const {
  const RayShear shear(ray);
  const SlabRay slab(ray);
  std::uint64_t visits = 0;
  std::uint64_t tests = 0;

  std::optional<Hit> best;
  double best_t = ray.t_max;
  StackEntry stack[kStackSize];
  std::size_t top = 0;
  double t_enter = 0.0;
  if (slab.hit(nodes_[0].bounds, best_t, t_enter)) stack[top++] = {0, t_enter};

  while (top > 0) {
    const StackEntry entry = stack[--top];
    if (entry.t_enter > best_t * (1.0 + 2.0 * kGamma3)) continue;
    const Node& node = nodes_[entry.node];
    ++visits;
    if (node.is_leaf()) {
      for (std::uint32_t p = node.first; p < node.first + node.count; ++p) {
        ++tests;
        const auto& c = sorted_[p];
        const auto t = shear.intersect(c[0], c[1], c[2]);
        if (!t || *t > best_t) continue;
        const std::uint32_t id = order_[p];
        if (!best || *t < best->t || (*t == best->t && id < best->triangle_id)) {
          best = Hit{*t, id};
          best_t = *t;
        }
      }
      continue;
    }
    double tl = 0.0;
    double tr = 0.0;
    const bool hl = slab.hit(nodes_[node.left].bounds, best_t, tl);
    const bool hr = slab.hit(nodes_[node.right].bounds, best_t, tr);
    if (hl && hr) {
      if (tl <= tr) {
        stack[top++] = {node.right, tr};
        stack[top++] = {node.left, tl};
      } else {
        stack[top++] = {node.left, tl};
        stack[top++] = {node.right, tr};
      }
    } else if (hl) {
      stack[top++] = {node.left, tl};
    } else if (hr) {
      stack[top++] = {node.right, tr};
    }
  }
  if (stats) {
    stats->rays_cast += 1;
    stats->node_visits += visits;
    stats->triangle_tests += tests;
  }
  return best;
}

std::size_t Bvh::count_hits(const Ray& ray, TraversalStats* stats) const {
  const RayShear shear(ray);
  const SlabRay slab(ray);
  std::uint64_t visits = 0;
  std::uint64_t tests = 0;
  std::size_t hits = 0;

  std::uint32_t stack[kStackSize];
  std::size_t top = 0;
  double t_enter = 0.0;
  if (slab.hit(nodes_[0].bounds, ray.t_max, t_enter)) stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    ++visits;
    if (node.is_leaf()) {
      for (std::uint32_t p = node.first; p < node.first + node.count; ++p) {
        ++tests;
        const auto& c = sorted_[p];
        if (shear.intersect(c[0], c[1], c[2])) ++hits;
      }
      continue;
    }
    if (slab.hit(nodes_[node.right].bounds, ray.t_max, t_enter)) stack[top++] = node.right;
    if (slab.hit(nodes_[node.left].bounds, ray.t_max, t_enter)) stack[top++] = node.left;
  }
  if (stats) {
    stats->rays_cast += 1;
    stats->node_visits += visits;
    stats->triangle_tests += tests;
  }
  return hits;
}

bool Bvh::touches(const Ray& ray, TraversalStats* stats) const {
  const RayShear shear(ray);
  std::uint64_t visits = 0;
  std::uint64_t tests = 0;
  bool found = false;

  std::uint32_t stack[kStackSize];
  std::size_t top = 0;
  if (nodes_[0].bounds.contains(ray.origin)) stack[top++] = 0;
  while (top > 0 && !found) {
    const Node& node = nodes_[stack[--top]];
    ++visits;
    if (node.is_leaf()) {
      for (std::uint32_t p = node.first; p < node.first + node.count && !found; ++p) {
        ++tests;
        const auto& c = sorted_[p];
        found = shear.touches_origin(c[0], c[1], c[2]);
      }
      continue;
    }
    if (nodes_[node.right].bounds.contains(ray.origin)) stack[top++] = node.right;
    if (nodes_[node.left].bounds.contains(ray.origin)) stack[top++] = node.left;
  }
  if (stats) {
    stats->node_visits += visits;
    stats->triangle_tests += tests;
  }
  return found;
}

void Bvh::validate() const {
  std::vector<bool> seen(order_.size(), false);
  for (std::uint32_t id : order_) {
    if (id >= seen.size() || seen[id]) throw std::logic_error("primitive order is not a permutation");
    seen[id] = true;
  }
  std::vector<std::uint32_t> covered(order_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& node = nodes_[i];
    if (node.is_leaf()) {
      for (std::uint32_t p = node.first; p < node.first + node.count; ++p) {
        const auto& c = sorted_[p];
        if (!node.bounds.contains(Aabb::of_triangle(c[0], c[1], c[2]))) {
          throw std::logic_error("leaf " + std::to_string(i) + " does not contain its triangle");
        }
        ++covered[p];
      }
    } else {
      if (node.left <= i || node.right <= i || node.left >= nodes_.size() || node.right >= nodes_.size()) {
        throw std::logic_error("node " + std::to_string(i) + " has invalid child links");
      }
      if (!node.bounds.contains(nodes_[node.left].bounds) ||
          !node.bounds.contains(nodes_[node.right].bounds)) {
        throw std::logic_error("node " + std::to_string(i) + " does not contain its children");
      }
    }
  }
  for (std::uint32_t c : covered) {
    if (c != 1) throw std::logic_error("a primitive is referenced by zero or several leaves");
  }
}

void Bvh::dump(std::ostream& out, int max_depth) const {
  auto box = [](const Aabb& b) {
    return "[" + std::to_string(b.min.x) + "," + std::to_string(b.min.y) + "," +
           std::to_string(b.min.z) + "]-[" + std::to_string(b.max.x) + "," +
           std::to_string(b.max.y) + "," + std::to_string(b.max.z) + "]";
  };
  auto rec = [&](auto&& self, std::uint32_t idx, int depth) -> void {
    if (depth > max_depth) return;
    const Node& node = nodes_[idx];
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ');
    if (node.is_leaf()) {
      out << "leaf " << idx << " " << box(node.bounds) << " tris:";
      for (std::uint32_t p = node.first; p < node.first + node.count; ++p) out << ' ' << order_[p];
      out << '\n';
    } else {
      out << "node " << idx << " " << box(node.bounds) << '\n';
      self(self, node.left, depth + 1);
      self(self, node.right, depth + 1);
    }
  };
  rec(rec, 0, 0);
}

}  // namespace rtpd
