#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "alphaforge/alphashape.hpp"
#include "alphaforge/error.hpp"
#include "alphaforge/mesh.hpp"
#include "alphaforge/synth.hpp"
#include "support.hpp"

using namespace alphaforge;

namespace {

PointCloud regular_tetrahedron() {
  PointCloud c;
  c.points = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  for (auto& p : c.points) p = p / std::sqrt(8.0);
  return c;
}

Errc code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidMesh;
}

}  // namespace

TEST_CASE("threshold presets") {
  CHECK(tau_presets::smooth() == std::vector<double>{0.05, 0.085, 0.11});
  const auto p = tau_presets::pretty();
  REQUIRE(p.size() == 24);
  CHECK(p.front() == doctest::Approx(0.15 - 12.0 / 50.0 + 0.0).epsilon(1e-12));
  CHECK(p.back() == doctest::Approx(0.15 + 11.0 / 50.0).epsilon(1e-12));
}

TEST_CASE("filter keeps circumradius at or below tau") {
  const DelaunayComplex dc = delaunay_complex(regular_tetrahedron());
  CHECK(filter_tetrahedra(dc, 0.7).size() == 1);
  CHECK(filter_tetrahedra(dc, 0.5).empty());
}

TEST_CASE("boundary extraction of small complexes") {
  PointCloud pts;
  pts.points = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
  const Tetrahedron t0 = make_tetrahedron(pts.points, {0, 1, 2, 3});
  const Tetrahedron t1 = make_tetrahedron(pts.points, {1, 2, 3, 4});

  const ExtractedSurface one = extract_boundary_faces(std::vector{t0}, pts);
  CHECK(one.mesh.faces.size() == 4);
  CHECK(euler_characteristic(one.mesh) == 2);
  CHECK(boundary_edges(one.mesh).empty());
  CHECK(enclosed_volume(one.mesh) > 0.0);
  CHECK(one.source_index == std::vector<std::uint32_t>{0, 1, 2, 3});

  const ExtractedSurface two = extract_boundary_faces(std::vector{t0, t1}, pts);
  CHECK(two.mesh.faces.size() == 6);
  CHECK(enclosed_volume(two.mesh) > 0.0);

  CHECK(code_of([&] { extract_boundary_faces(std::vector<Tetrahedron>{}, pts); }) == Errc::EmptySelection);
}

TEST_CASE("cube split around its main diagonal") {
  const Mesh cube = testing::unit_cube();
  PointCloud pts;
  pts.points = cube.vertices;
  // Vertices 0 and 6 are the diagonal; the six tets walk the ring 1,2,3,7,4,5.
  const std::uint32_t ring[6] = {1, 2, 3, 7, 4, 5};
  std::vector<Tetrahedron> tets;
  for (int i = 0; i < 6; ++i) {
    std::array<std::uint32_t, 4> v{0, ring[i], ring[(i + 1) % 6], 6};
    if (testing::det3(pts.points[v[1]] - pts.points[0], pts.points[v[2]] - pts.points[0], pts.points[6] - pts.points[0]) < 0)
      std::swap(v[1], v[2]);
    tets.push_back(make_tetrahedron(pts.points, v));
  }

  // Oracle: count how many tets use each sorted face triple.
  std::map<std::array<std::uint32_t, 3>, int> count;
  for (const auto& t : tets)
    for (int k = 0; k < 4; ++k) {
      std::array<std::uint32_t, 3> f{};
      int j = 0;
      for (int m = 0; m < 4; ++m)
        if (m != k) f[j++] = t.v[m];
      std::sort(f.begin(), f.end());
      ++count[f];
    }
  std::size_t expected = 0;
  for (const auto& [f, c] : count) expected += c == 1;
  CHECK(expected == 12);

  const ExtractedSurface s = extract_boundary_faces(tets, pts);
  CHECK(s.mesh.faces.size() == expected);
  CHECK(euler_characteristic(s.mesh) == 2);
  CHECK(enclosed_volume(s.mesh) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tiny tau gives an empty mesh") {
  const PointCloud c = testing::random_cloud(50, 4);
  CHECK(code_of([&] { triangulate(c, 1e-9); }) == Errc::EmptyMesh);
}

TEST_CASE("monotone in tau and convex hull at large tau") {
  const PointCloud c = testing::random_cloud(60, 17);
  const DelaunayComplex dc = delaunay_complex(c);
  const double taus[] = {0.1, 0.15, 0.2, 0.3, 0.5, 1.0};
  std::set<std::array<std::uint32_t, 4>> prev;
  for (double tau : taus) {
    std::set<std::array<std::uint32_t, 4>> cur;
    for (const auto& t : filter_tetrahedra(dc, tau)) cur.insert(t.v);
    CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
    prev = cur;
  }
  double rmax = 0.0;
  for (const auto& t : dc.tetrahedra) rmax = std::max(rmax, t.circumradius);
  const ExtractedSurface hull = triangulate_surface(dc, rmax);
  CHECK(euler_characteristic(hull.mesh) == 2);
  CHECK(boundary_edges(hull.mesh).empty());
  CHECK(enclosed_volume(hull.mesh) == doctest::Approx(testing::brute_hull_volume(c.points)).epsilon(1e-9));
}

TEST_CASE("boundary edges bound by two faces for closed shapes") {
  SUBCASE("sphere") {
    const SyntheticShape s = synth({.shape = Shape::Sphere, .n = 2000, .seed = 1});
    const Mesh m = triangulate(s.cloud, 1.2);
    CHECK(euler_characteristic(m) == 2);
    CHECK(boundary_edges(m).empty());
  }
  SUBCASE("torus") {
    const SyntheticShape s = synth({.shape = Shape::Torus, .n = 2000, .seed = 1});
    const Mesh m = triangulate(s.cloud, 0.3);
    CHECK(euler_characteristic(m) == 0);
    CHECK(boundary_edges(m).empty());
  }
  SUBCASE("thick torus") {
    // A solid tube wider than tau leaves interior voids; tau has to exceed the tube radius.
    const SyntheticShape s = synth({.shape = Shape::Torus, .n = 2000, .seed = 1, .minor_radius = 0.4});
    const Mesh m = triangulate(s.cloud, 0.5);
    CHECK(euler_characteristic(m) == 0);
    CHECK(boundary_edges(m).empty());
  }
  SUBCASE("any tau") {
    const PointCloud c = testing::random_cloud(200, 99);
    const Mesh m = triangulate(c, 0.15);
    const auto inc = edge_face_incidence(m);
    for (const auto& f : inc.faces) CHECK(f.size() >= 1);
  }
}

TEST_CASE("deterministic output") {
  const PointCloud c = testing::random_cloud(300, 5);
  CHECK(triangulate(c, 0.2) == triangulate(c, 0.2));
}
