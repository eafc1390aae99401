#include <doctest.h>

#include <set>
#include <sstream>

#include "alphaforge/alphashape.hpp"
#include "alphaforge/error.hpp"
#include "alphaforge/loss.hpp"
#include "alphaforge/mesh.hpp"
#include "alphaforge/refine.hpp"
#include "alphaforge/sampling.hpp"
#include "alphaforge/synth.hpp"
#include "support.hpp"

using namespace alphaforge;

namespace {

Errc code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidMesh;
}

// Umbrella step written out per vertex from the face list.
Mesh umbrella_step(const Mesh& m, double factor) {
  std::vector<std::set<std::uint32_t>> nb(m.vertices.size());
  for (const auto& f : m.faces)
    for (int k = 0; k < 3; ++k) {
      nb[f[k]].insert(f[(k + 1) % 3]);
      nb[f[k]].insert(f[(k + 2) % 3]);
    }
  Mesh out = m;
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    if (nb[i].empty()) continue;
    Vec3 mean;
    for (auto j : nb[i]) mean += m.vertices[j];
    mean = mean / static_cast<double>(nb[i].size());
    out.vertices[i] = m.vertices[i] + factor * (mean - m.vertices[i]);
  }
  return out;
}

}  // namespace

TEST_CASE("taubin smoothing") {
  const Mesh m = testing::jitter(icosphere(2), 0.05, 1);
  CHECK(taubin_smooth(m, {.iterations = 0}) == m);

  Mesh expected = m;
  for (int i = 0; i < 3; ++i) expected = umbrella_step(umbrella_step(expected, 0.5), -0.53);
  const Mesh got = taubin_smooth(m, {.iterations = 3});
  CHECK(got.faces == m.faces);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) CHECK(distance(got.vertices[i], expected.vertices[i]) < 1e-12);

  Mesh lap = m;
  for (int i = 0; i < 4; ++i) lap = umbrella_step(lap, 0.3);
  const Mesh l = laplacian_smooth(m, 0.3, 4);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) CHECK(distance(l.vertices[i], lap.vertices[i]) < 1e-12);

  CHECK(code_of([] { TaubinConfig{.lambda = 0.0}.validate(); }) == Errc::ConfigError);
  CHECK(code_of([] { TaubinConfig{.lambda = 1.0}.validate(); }) == Errc::ConfigError);
  CHECK(code_of([] { TaubinConfig{.mu_shrink = -0.4}.validate(); }) == Errc::ConfigError);
  CHECK(code_of([] { TaubinConfig{.iterations = -1}.validate(); }) == Errc::ConfigError);

  Mesh iso = m;
  iso.vertices.push_back({9, 9, 9});
  CHECK(taubin_smooth(iso, {}).vertices.back() == Point3{9, 9, 9});
}

TEST_CASE("taubin keeps more volume than lambda-only smoothing") {
  const Mesh sphere = icosphere(3);
  const double v0 = enclosed_volume(sphere);
  const double vt = enclosed_volume(taubin_smooth(sphere, {}));
  const double vl = enclosed_volume(laplacian_smooth(sphere, 0.5, 10));
  CHECK(vt / v0 > vl / v0);
}

TEST_CASE("subdivision") {
  Mesh tri;
  tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  tri.faces = {{0, 1, 2}};
  const Mesh s = subdivide(tri);
  CHECK(s.vertices.size() == 6);
  CHECK(s.faces.size() == 4);
  CHECK(enclosed_volume(s) == 0.0);
  double area = 0.0;
  for (const auto& f : s.faces) {
    area += face_area(s, f);
    CHECK(face_cross(s, f).z > 0.0);
  }
  CHECK(area == doctest::Approx(0.5).epsilon(1e-15));

  const Mesh t = subdivide(testing::tetrahedron_surface());
  CHECK(t.vertices.size() == 10);
  CHECK(t.faces.size() == 16);
  CHECK(euler_characteristic(t) == 2);
  CHECK(enclosed_volume(t) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  // Every new vertex is the midpoint of an input edge.
  const auto edges = unique_edges(testing::tetrahedron_surface());
  const Mesh tet = testing::tetrahedron_surface();
  for (std::size_t k = 0; k < edges.size(); ++k)
    CHECK(t.vertices[4 + k] == 0.5 * (tet.vertices[edges[k].first] + tet.vertices[edges[k].second]));
}

TEST_CASE("baseline construction") {
  const SyntheticShape s = synth({.shape = Shape::Sphere, .n = 2000, .seed = 3});
  const Mesh plain = triangulate(s.cloud, 1.2);
  CHECK(build_baseline(s.cloud, 1.2, {.iterations = 0}) == plain);

  const Mesh b = build_baseline(s.cloud, 1.2, {});
  CHECK(boundary_edges(b).empty());
  CHECK(euler_characteristic(b) == 2);
  CHECK(b.vertices.size() == plain.vertices.size());
  CHECK(code_of([&] { build_baseline(s.cloud, 1e-9, {}); }) == Errc::EmptyMesh);
}

TEST_CASE("refinement invariants") {
  const Mesh gt_mesh = icosphere(2);
  const PointCloud gt = sample_surface(icosphere(4), 3000, 1);
  const Mesh noisy = testing::jitter(gt_mesh, 0.05, 2);

  RefineConfig zero;
  zero.iters_per_stage = 0;
  const RefineResult z = refine_mesh(noisy, gt, noisy, zero, 1);
  CHECK(z.mesh == noisy);
  CHECK(z.trace.empty());

  RefineConfig cfg;
  cfg.iters_per_stage = 30;
  cfg.n_samples = 1000;
  const RefineResult r = refine_mesh(noisy, gt, noisy, cfg, 4);
  CHECK(r.mesh.faces == noisy.faces);
  CHECK(r.trace.size() == 60);
  REQUIRE(r.stage_displacement.size() == 2);
  for (double d : r.stage_displacement) CHECK(d < 1.0 - 1e-12);
  CHECK(r.trace.front().stage == 0);
  CHECK(r.trace.back().stage == 1);
  CHECK(r.trace.back().iteration == 29);

  const RefineResult again = refine_mesh(noisy, gt, noisy, cfg, 4);
  CHECK(again.mesh == r.mesh);
}

TEST_CASE("exact mesh is a fixed point of chamfer-only refinement") {
  const Mesh m = icosphere(2);
  const PointCloud gt = sample_surface(m, 5000, 7);
  RefineConfig cfg;
  cfg.weights = LossWeights{};
  cfg.weights.lambda1 = 0.0;
  cfg.iters_per_stage = 20;
  cfg.step_size = 0.01;
  const RefineResult r = refine_mesh(m, gt, Mesh{}, cfg, 8);
  const PointCloud probe0 = sample_surface(m, 5000, 99), probe1 = sample_surface(r.mesh, 5000, 99);
  const double c0 = chamfer(probe0, gt), c1 = chamfer(probe1, gt);
  CHECK(c1 <= c0 * 1.01);
}

TEST_CASE("subdivision between stages") {
  const Mesh m = testing::jitter(icosphere(1), 0.03, 5);
  const PointCloud gt = sample_surface(icosphere(3), 2000, 3);
  RefineConfig cfg;
  cfg.iters_per_stage = 5;
  cfg.subdivide_between_stages = true;
  const RefineResult r = refine_mesh(m, gt, m, cfg, 1);
  CHECK(r.mesh.faces.size() == 4 * m.faces.size());
  CHECK(euler_characteristic(r.mesh) == 2);

  const Mesh other = icosphere(2);
  CHECK(code_of([&] { refine_mesh(m, gt, other, cfg, 1); }) == Errc::VertexCountMismatch);
}

TEST_CASE("config validation") {
  RefineConfig c;
  c.stages = 0;
  CHECK(code_of([&] { c.validate(); }) == Errc::ConfigError);
  c = RefineConfig{};
  c.step_size = 0.0;
  CHECK(code_of([&] { c.validate(); }) == Errc::ConfigError);
  c = RefineConfig{};
  c.n_samples = 0;
  CHECK(code_of([&] { c.validate(); }) == Errc::ConfigError);
}

TEST_CASE("trace csv") {
  TraceEntry e;
  e.stage = 1;
  e.iteration = 2;
  e.loss.cmd = 0.5;
  e.loss.total = 0.25;
  std::ostringstream out;
  write_trace_csv(out, {e});
  CHECK(out.str() ==
        "stage,iteration,logcmd,cmd,laplacian_reg,edge_len,normal_consistency,normal_loss,total\n"
        "1,2,0,0.5,0,0,0,0,0.25\n");
}
