#include <doctest.h>

#include "alphaforge/alphashape.hpp"
#include "alphaforge/error.hpp"
#include "alphaforge/mesh.hpp"
#include "alphaforge/synth.hpp"
#include "support.hpp"

using namespace alphaforge;

TEST_CASE("sphere samples lie on the unit sphere") {
  const SyntheticShape s = synth({.shape = Shape::Sphere, .n = 1000, .seed = 2});
  REQUIRE(s.cloud.size() == 1000);
  REQUIRE(s.cloud.has_normals());
  for (std::size_t i = 0; i < 1000; ++i) {
    CHECK(std::abs(norm(s.cloud.points[i]) - 1.0) <= 1e-9);
    CHECK(norm(s.cloud.normals[i] - s.cloud.points[i]) < 1e-9);
  }
}

TEST_CASE("reference meshes have the target topology") {
  const std::pair<Shape, long> cases[] = {{Shape::Sphere, 2}, {Shape::Torus, 0}, {Shape::Box, 2}, {Shape::Stacked, -2}};
  for (auto [shape, chi] : cases) {
    const SyntheticShape s = synth({.shape = shape, .n = 500, .seed = 1});
    CHECK(euler_characteristic(s.reference) == chi);
    CHECK(testing::brute_euler(s.reference) == chi);
    CHECK(boundary_edges(s.reference).empty());
    CHECK(enclosed_volume(s.reference) > 0.0);
    CHECK_NOTHROW(validate(s.reference));
    CHECK(s.cloud.size() == 500);
  }
}

TEST_CASE("torus samples satisfy the implicit equation") {
  const SyntheticShape s = synth({.shape = Shape::Torus, .n = 800, .seed = 3, .major_radius = 1.0, .minor_radius = 0.3});
  for (const auto& p : s.cloud.points) {
    const double q = std::hypot(p.x, p.y) - 1.0;
    CHECK(std::abs(q * q + p.z * p.z - 0.09) < 1e-9);
  }
}

TEST_CASE("noise moves points along normals") {
  const SyntheticShape clean = synth({.shape = Shape::Sphere, .n = 300, .seed = 5});
  const SyntheticShape noisy = synth({.shape = Shape::Sphere, .n = 300, .sigma = 0.05, .seed = 5});
  double sq = 0.0;
  for (std::size_t i = 0; i < 300; ++i) {
    const Vec3 d = noisy.cloud.points[i] - clean.cloud.points[i];
    CHECK(norm(cross(d, clean.cloud.normals[i])) < 1e-12);
    sq += squared_norm(d);
  }
  CHECK(std::sqrt(sq / 300.0) == doctest::Approx(0.05).epsilon(0.2));
}

TEST_CASE("helpers and validation") {
  const Mesh ico = icosphere(2, 2.0);
  CHECK(ico.vertices.size() == 162);
  CHECK(ico.faces.size() == 320);
  for (const auto& v : ico.vertices) CHECK(norm(v) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(enclosed_volume(ico) > 0.0);
  const Mesh t = uv_torus(1.0, 0.25, 16, 8);
  CHECK(t.faces.size() == 2 * 16 * 8);
  CHECK(euler_characteristic(t) == 0);
  CHECK(enclosed_volume(t) > 0.0);

  CHECK(parse_shape("stacked") == Shape::Stacked);
  CHECK(to_string(Shape::Torus) == "torus");
  auto code = [](SyntheticSpec s) {
    try {
      s.validate();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidMesh;
  };
  CHECK(code({.n = 0}) == Errc::ConfigError);
  CHECK(code({.sigma = -1.0}) == Errc::ConfigError);
  CHECK(code({.shape = Shape::Torus, .major_radius = 1.0, .minor_radius = 1.5}) == Errc::ConfigError);
}

TEST_CASE("determinism") {
  for (Shape sh : {Shape::Sphere, Shape::Torus, Shape::Box, Shape::Stacked}) {
    const SyntheticShape a = synth({.shape = sh, .n = 400, .sigma = 0.01, .seed = 9});
    const SyntheticShape b = synth({.shape = sh, .n = 400, .sigma = 0.01, .seed = 9});
    CHECK(a.cloud.points == b.cloud.points);
    CHECK(a.reference == b.reference);
  }
}
