#include <gtest/gtest.h>
#include <gmpxx.h>

#include <random>
#include <set>
#include <sstream>

#include "rtpd/accel.hpp"
#include "rtpd/parallel.hpp"
#include "rtpd/shapes.hpp"
#include "support.hpp"

namespace rtpd {
namespace {

using test::random_in_box;
using test::random_unit;

TEST(BvhBuild, SingleTriangle) {
  const std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {0, 2, 1}};
  const std::vector<Triangle> t{{0, 1, 2}};
  const Bvh bvh = Bvh::build(v, t);
  ASSERT_EQ(bvh.nodes().size(), 1u);
  EXPECT_TRUE(bvh.nodes()[0].is_leaf());
  const Aabb expect = Aabb::of_triangle(v[0], v[1], v[2]);
  EXPECT_EQ(bvh.bounds().min, expect.min);
  EXPECT_EQ(bvh.bounds().max, expect.max);
}

TEST(BvhBuild, TwoDisjointTriangles) {
  const std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 5, 5}, {6, 5, 5}, {5, 6, 7}};
  const std::vector<Triangle> t{{0, 1, 2}, {3, 4, 5}};
  const Bvh bvh = Bvh::build(v, t);
  EXPECT_EQ(bvh.bounds().min, (Vec3{0, 0, 0}));
  EXPECT_EQ(bvh.bounds().max, (Vec3{6, 6, 7}));
  bvh.validate();
}

TEST(BvhBuild, EmptyThrows) {
  EXPECT_THROW(Bvh::build({}, {}), std::invalid_argument);
}

TEST(BvhBuild, InvariantsAndDeterminism) {
  const TriangleMesh m = test::random_soup(1500, 5);
  const Bvh a = Bvh::build(m);
  const Bvh b = Bvh::build(m);
  a.validate();
  std::set<std::uint32_t> ids(a.primitive_order().begin(), a.primitive_order().end());
  EXPECT_EQ(ids.size(), m.triangle_count());
  EXPECT_EQ(*ids.rbegin(), m.triangle_count() - 1);
  ASSERT_EQ(a.nodes().size(), b.nodes().size());
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    const auto& x = a.nodes()[i];
    const auto& y = b.nodes()[i];
    EXPECT_TRUE(x.bounds.min == y.bounds.min && x.bounds.max == y.bounds.max && x.left == y.left &&
                x.right == y.right && x.first == y.first && x.count == y.count);
  }
  EXPECT_TRUE(std::equal(a.primitive_order().begin(), a.primitive_order().end(), b.primitive_order().begin()));
  for (const auto& n : a.nodes()) {
    if (n.is_leaf()) EXPECT_LE(n.count, Bvh::kMaxLeafSize);
  }
}

TEST(BvhBuild, CoincidentCentroids) {
  // Every triangle shares one centroid, so all Morton codes are equal.
  TriangleMesh m;
  for (std::uint32_t i = 0; i < 37; ++i) {
    const double s = 1.0 + i;
    m.vertices.push_back({s, 0, 0});
    m.vertices.push_back({-s, s, 0});
    m.vertices.push_back({0, -s, 0});
    m.triangles.push_back({3 * i, 3 * i + 1, 3 * i + 2});
  }
  const Bvh bvh = Bvh::build(m);
  bvh.validate();
  const Ray r{{0.1, 0.1, -1}, {0, 0, 1}};
  EXPECT_EQ(bvh.count_hits(r), 37u);
  EXPECT_EQ(bvh.closest_hit(r)->triangle_id, 0u);  // all at t = 1; smallest id wins
}

TEST(BvhBuild, Dump) {
  const Bvh bvh = Bvh::build(shapes::box(1));
  std::ostringstream out;
  bvh.dump(out);
  EXPECT_NE(out.str().find("leaf"), std::string::npos);
}

TEST(MortonCode, Interleaving) {
  EXPECT_EQ(morton_code({0, 0, 0}), 0u);
  EXPECT_EQ(morton_code({1, 1, 1}), (1u << 30) - 1);
  EXPECT_EQ(morton_code({1, 0, 0}), 0x24924924u);
  EXPECT_EQ(morton_code({0, 0, 1}), 0x09249249u);
}

TEST(ClosestHit, UnitCubeExamples) {
  const Bvh bvh = Bvh::build(shapes::box(1));
  const auto hit = bvh.closest_hit({{0.5, 0.5, 0.5}, {1, 0, 0}});
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->t, 0.5);
  EXPECT_FALSE(bvh.closest_hit({{0.5, 0.5, 0.5}, {1, 0, 0}, 0.4}));
  // t = t_max is a hit.
  EXPECT_TRUE(bvh.closest_hit({{0.5, 0.5, 0.5}, {1, 0, 0}, 0.5}));
}

TEST(CountHits, UnitCubeExamples) {
  const Bvh bvh = Bvh::build(shapes::box(1));
  EXPECT_EQ(bvh.count_hits({{0.5, 0.5, 0.5}, {1, 0, 0}}), 1u);
  EXPECT_EQ(bvh.count_hits({{2, 0.5, 0.5}, {1, 0, 0}}), 0u);
  EXPECT_EQ(bvh.count_hits({{2, 0.5, 0.5}, {-1, 0, 0}}), 2u);
  // Through a face diagonal shared by the two triangles of the face.
  EXPECT_EQ(bvh.count_hits({{2, 0.25, 0.25}, {-1, 0, 0}}), 2u);
}

TEST(Intersect, Examples) {
  const Vec3 a{-1, -1, 0}, b{1, -1, 0}, c{0, 1, 0};
  const auto t = intersect_triangle({{0, 0, -1}, {0, 0, 1}}, a, b, c);
  ASSERT_TRUE(t);
  EXPECT_EQ(*t, 1.0);
  EXPECT_FALSE(intersect_triangle({{0, 0, 1}, {1, 0, 0}}, a, b, c));
  EXPECT_FALSE(intersect_triangle({{0, 0, 0.5}, {0, 0, 1}}, a, b, c));  // behind the origin
  EXPECT_TRUE(intersect_triangle({{0, 0, -1}, {0, 0, 1}}, c, b, a));   // either winding
  // Origin on the plane: t = 0 is excluded.
  EXPECT_FALSE(intersect_triangle({{0, 0, 0}, {0, 0, 1}}, a, b, c));
}

TEST(Intersect, DegenerateTriangleNeverHits) {
  const Vec3 a{0, 0, 0}, b{1, 0, 0}, c{2, 0, 0};
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 o{1.0, -1.0, 0.0};
    const Ray r{o + Vec3{0, 0, 1e-3 * (i - 500)}, normalize(Vec3{0, 1, 0} + 0.001 * random_unit(rng))};
    EXPECT_FALSE(intersect_triangle(r, a, b, c));
  }
}

// Rays aimed at interior edges of a triangulated square in z = 0 must cross it
// exactly once. The expected count comes from the exact rational intersection
// of the (rounded) ray with the plane.
TEST(Intersect, WatertightAcrossSharedEdges) {
  constexpr int n = 4;
  TriangleMesh quad;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) quad.vertices.push_back({double(i) / n, double(j) / n, 0.0});
  }
  auto id = [](int i, int j) { return static_cast<std::uint32_t>(j * (n + 1) + i); };
  std::vector<std::pair<std::uint32_t, std::uint32_t>> interior_edges;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      // Alternate the diagonal so both orientations occur.
      if ((i + j) % 2 == 0) {
        quad.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        quad.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        interior_edges.push_back({id(i, j), id(i + 1, j + 1)});
      } else {
        quad.triangles.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
        quad.triangles.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
        interior_edges.push_back({id(i + 1, j), id(i, j + 1)});
      }
      if (i > 0) interior_edges.push_back({id(i, j), id(i, j + 1)});
      if (j > 0) interior_edges.push_back({id(i, j), id(i + 1, j)});
    }
  }
  const Bvh bvh = Bvh::build(quad);

  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, interior_edges.size() - 1);
  int checked = 0;
  for (int k = 0; k < 10000; ++k) {
    const auto [e0, e1] = interior_edges[pick(rng)];
    const Vec3 target = quad.vertices[e0] + (quad.vertices[e1] - quad.vertices[e0]) * u(rng);
    const double side = u(rng) < 0.5 ? 1.0 : -1.0;
    const Vec3 origin{-1.0 + 3.0 * u(rng), -1.0 + 3.0 * u(rng), side * (0.1 + 2.0 * u(rng))};
    const Ray ray{origin, normalize(target - origin)};

    // Exact plane crossing of the ray as represented in doubles.
    const mpq_class oz(ray.origin.z), dz(ray.direction.z);
    if (dz == 0) continue;
    const mpq_class t = -oz / dz;
    const mpq_class px = mpq_class(ray.origin.x) + t * mpq_class(ray.direction.x);
    const mpq_class py = mpq_class(ray.origin.y) + t * mpq_class(ray.direction.y);
    std::size_t expected = 0;
    if (t > 0 && px >= 0 && px <= 1 && py >= 0 && py <= 1) expected = 1;
    const bool on_boundary = px == 0 || px == 1 || py == 0 || py == 1;
    if (on_boundary) continue;

    ASSERT_EQ(bvh.count_hits(ray), expected) << "ray " << k;
    ASSERT_EQ(test::scan_count(quad, ray), expected) << "ray " << k;
    ++checked;
  }
  EXPECT_GT(checked, 9900);
}

// Rays through shared vertices and edges of a closed sphere cross an odd
// number of times from inside.
TEST(Intersect, ClosedMeshParityThroughVertices) {
  const TriangleMesh m = shapes::icosphere(2);
  const Bvh bvh = Bvh::build(m);
  for (const Vec3& v : m.vertices) {
    const Vec3 o{0.01, -0.02, 0.015};
    EXPECT_EQ(bvh.count_hits({o, normalize(v - o)}) % 2, 1u);
    EXPECT_EQ(bvh.count_hits({Vec3{0, 0, 0}, normalize(v)}), 1u);
  }
}

void expect_matches_scan(const TriangleMesh& m, std::uint64_t seed, int rays) {
  const Bvh bvh = Bvh::build(m);
  std::mt19937_64 rng(seed);
  const Aabb box = m.bounds().inflated(0.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < rays; ++k) {
    Ray r{random_in_box(rng, box), random_unit(rng)};
    if (k % 3 == 0) r.t_max = 2.0 * u(rng);
    const auto got = bvh.closest_hit(r);
    const auto want = test::scan_closest(m, r);
    ASSERT_EQ(got.has_value(), want.has_value()) << "ray " << k;
    if (got) {
      ASSERT_EQ(got->t, want->t) << "ray " << k;
      ASSERT_EQ(got->triangle_id, want->triangle_id) << "ray " << k;
    }
    ASSERT_EQ(bvh.count_hits(r), test::scan_count(m, r)) << "ray " << k;
  }
}

TEST(BvhQuery, RandomSoupMatchesLinearScan) {
  expect_matches_scan(test::random_soup(500, 17), 99, 1000);
}

TEST(BvhQuery, MeshesMatchLinearScan) {
  expect_matches_scan(shapes::icosphere(3), 1, 2000);
  expect_matches_scan(shapes::blob(3, 5), 2, 2000);
  expect_matches_scan(shapes::box(6), 3, 2000);
}

TEST(BvhQuery, RaysThroughVerticesMatchLinearScan) {
  const TriangleMesh m = shapes::blob(2, 9);
  const Bvh bvh = Bvh::build(m);
  std::mt19937_64 rng(8);
  for (const Vec3& v : m.vertices) {
    const Vec3 o = random_in_box(rng, m.bounds().inflated(1.0));
    const Ray r{o, normalize(v - o)};
    const auto got = bvh.closest_hit(r);
    const auto want = test::scan_closest(m, r);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (got) {
      EXPECT_EQ(got->t, want->t);
      EXPECT_EQ(got->triangle_id, want->triangle_id);
    }
    EXPECT_EQ(bvh.count_hits(r), test::scan_count(m, r));
  }
}

TEST(BvhQuery, HitPointInsideTriangleBox) {
  const TriangleMesh m = shapes::blob(3, 2);
  const Bvh bvh = Bvh::build(m);
  std::mt19937_64 rng(21);
  for (int k = 0; k < 3000; ++k) {
    const Ray r{random_in_box(rng, m.bounds()), random_unit(rng)};
    const auto hit = bvh.closest_hit(r);
    if (!hit) continue;
    const auto& tri = bvh.triangle(hit->triangle_id);
    const Vec3 p = r.origin + r.direction * hit->t;
    EXPECT_TRUE(Aabb::of_triangle(tri[0], tri[1], tri[2]).contains(p, 1e-9)) << k;
  }
}

TEST(BvhQuery, MonotoneCulling) {
  const TriangleMesh m = shapes::icosphere(3);
  const Bvh bvh = Bvh::build(m);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 500; ++k) {
    const Ray base{random_in_box(rng, m.bounds().inflated(0.3)), random_unit(rng)};
    const auto full = bvh.closest_hit(base);
    std::size_t last_count = bvh.count_hits(base);
    for (double t_max : {4.0, 2.0, 1.0, 0.5, 0.25, 0.1, 0.01}) {
      Ray r = base;
      r.t_max = t_max;
      const auto h = bvh.closest_hit(r);
      if (h) {
        ASSERT_TRUE(full);
        EXPECT_EQ(h->t, full->t);
        EXPECT_EQ(h->triangle_id, full->triangle_id);
      } else if (full) {
        EXPECT_GT(full->t, t_max);
      }
      const std::size_t c = bvh.count_hits(r);
      EXPECT_LE(c, last_count);
      last_count = c;
    }
  }
}

TEST(BvhQuery, TouchesExactSurfacePoints) {
  const TriangleMesh m = shapes::icosphere(2);
  const Bvh bvh = Bvh::build(m);
  for (const Vec3& v : m.vertices) EXPECT_TRUE(bvh.touches({v, {1, 0, 0}, 0.0}));
  EXPECT_FALSE(bvh.touches({{0, 0, 0}, {1, 0, 0}, 0.0}));
  EXPECT_FALSE(bvh.touches({m.vertices[0] * 1.001, {1, 0, 0}, 0.0}));
  const Bvh cube = Bvh::build(shapes::box(1));
  EXPECT_TRUE(cube.touches({{1.0, 0.25, 0.5}, {1, 0, 0}, 0.0}));
  EXPECT_FALSE(cube.touches({{0.5, 0.5, 0.5}, {1, 0, 0}, 0.0}));
}

TEST(BvhQuery, StatsCountWork) {
  const Bvh bvh = Bvh::build(shapes::icosphere(3));
  TraversalStats s;
  bvh.closest_hit({{0, 0, 0}, {1, 0, 0}}, &s);
  EXPECT_EQ(s.rays_cast, 1u);
  EXPECT_GT(s.node_visits, 0u);
  EXPECT_GT(s.triangle_tests, 0u);
  TraversalStats shorter;
  bvh.closest_hit({{0, 0, 0}, {1, 0, 0}, 0.1}, &shorter);
  EXPECT_LT(shorter.triangle_tests, s.triangle_tests);
}

TEST(BvhQuery, ConcurrentQueriesAgree) {
  const TriangleMesh m = shapes::blob(3, 4);
  const Bvh bvh = Bvh::build(m);
  std::mt19937_64 rng(77);
  std::vector<Ray> rays;
  for (int k = 0; k < 4000; ++k) rays.push_back({random_in_box(rng, m.bounds()), random_unit(rng)});
  std::vector<double> serial(rays.size());
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const auto h = bvh.closest_hit(rays[i]);
    serial[i] = h ? h->t : -1.0;
  }
  set_thread_count(4);
  std::vector<double> par(rays.size());
  parallel_for(rays.size(), [&](std::size_t i) {
    const auto h = bvh.closest_hit(rays[i]);
    par[i] = h ? h->t : -1.0;
  });
  set_thread_count(0);
  EXPECT_EQ(serial, par);
}

}  // namespace
}  // namespace rtpd
