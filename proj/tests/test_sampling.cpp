#include <doctest.h>

#include "alphaforge/error.hpp"
#include "alphaforge/mesh.hpp"
#include "alphaforge/sampling.hpp"
#include "alphaforge/synth.hpp"
#include "support.hpp"

using namespace alphaforge;

namespace {

Mesh grid_rectangle(int nx, int ny, double w, double h) {
  Mesh m;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) m.vertices.push_back({w * i / nx, h * j / ny, 0.0});
  auto id = [&](int i, int j) { return static_cast<std::uint32_t>(j * (nx + 1) + i); };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

}  // namespace

TEST_CASE("empty request") {
  CHECK(sample_surface(testing::unit_cube(), 0, 1).empty());
}

TEST_CASE("samples lie in their triangle") {
  Mesh tri;
  tri.vertices = {{0.2, -1, 3}, {1.5, 0.5, 2}, {-0.7, 2, 1}};
  tri.faces = {{0, 1, 2}};
  const PointCloud c = sample_surface(tri, 1000, 3);
  REQUIRE(c.size() == 1000);
  const Vec3 a = tri.vertices[0], b = tri.vertices[1], d = tri.vertices[2];
  const Vec3 n = cross(b - a, d - a);
  for (const auto& p : c.points) {
    // Barycentric coordinates by signed sub-areas.
    const double w0 = dot(cross(d - b, p - b), n) / dot(n, n);
    const double w1 = dot(cross(a - d, p - d), n) / dot(n, n);
    const double w2 = dot(cross(b - a, p - a), n) / dot(n, n);
    CHECK(w0 >= -1e-9);
    CHECK(w1 >= -1e-9);
    CHECK(w2 >= -1e-9);
    CHECK(std::abs(w0 + w1 + w2 - 1.0) <= 1e-9);
    CHECK(std::abs(dot(p - a, n)) / norm(n) <= 1e-9);
  }
}

TEST_CASE("two equal triangles split evenly") {
  const Mesh sq = grid_rectangle(1, 1, 1.0, 1.0);
  const SurfaceSamples s = sample_surface_detailed(sq, 100000, 42);
  std::size_t first = 0;
  for (auto f : s.face) first += f == 0;
  CHECK(std::abs(static_cast<double>(first) / 100000.0 - 0.5) <= 0.01);
}

TEST_CASE("empirical density over a grid") {
  const Mesh rect = grid_rectangle(3, 7, 2.0, 1.0);
  const std::size_t n = 1000000;
  const PointCloud c = sample_surface(rect, n, 7);
  std::vector<std::size_t> cells(100, 0);
  for (const auto& p : c.points) {
    const int i = std::min(9, static_cast<int>(p.x / 2.0 * 10));
    const int j = std::min(9, static_cast<int>(p.y * 10));
    ++cells[j * 10 + i];
  }
  for (auto k : cells) CHECK(std::abs(static_cast<double>(k) - n / 100.0) <= 0.05 * n / 100.0);
}

TEST_CASE("sample normals are the face normals") {
  const Mesh m = testing::jitter(icosphere(2), 0.03, 1);
  const auto fn = face_normals(m);
  const SurfaceSamples s = sample_surface_detailed(m, 5000, 9);
  REQUIRE(s.cloud.has_normals());
  for (std::size_t i = 0; i < s.cloud.size(); ++i) {
    CHECK(s.cloud.normals[i] == fn[s.face[i]]);
    CHECK(std::abs(norm(s.cloud.normals[i]) - 1.0) < 1e-12);
    const Face f = m.faces[s.face[i]];
    const Vec3 rebuilt = s.bary[i][0] * m.vertices[f.a] + s.bary[i][1] * m.vertices[f.b] + s.bary[i][2] * m.vertices[f.c];
    CHECK(distance(rebuilt, s.cloud.points[i]) < 1e-12);
  }
}

TEST_CASE("determinism and counter layout") {
  const Mesh m = icosphere(1);
  const PointCloud a = sample_surface(m, 500, 11);
  const PointCloud b = sample_surface(m, 500, 11);
  CHECK(a.points == b.points);
  CHECK(a.normals == b.normals);
  // Sample i depends only on counters 3i..3i+2, so a prefix request agrees.
  const PointCloud prefix = sample_surface(m, 100, 11);
  for (std::size_t i = 0; i < 100; ++i) CHECK(prefix.points[i] == a.points[i]);
  CHECK(sample_surface(m, 500, 12).points != a.points);
}

TEST_CASE("no surface") {
  Mesh flat;
  flat.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  flat.faces = {{0, 1, 2}};
  try {
    sample_surface(flat, 10, 0);
    FAIL("expected NoSurface");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoSurface);
  }
}
