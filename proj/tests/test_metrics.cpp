#include <doctest.h>

#include <numbers>

#include "alphaforge/error.hpp"
#include "alphaforge/metrics.hpp"
#include "alphaforge/mesh.hpp"
#include "alphaforge/sampling.hpp"
#include "alphaforge/synth.hpp"
#include "support.hpp"

using namespace alphaforge;

namespace {

PointCloud cloud_of(std::vector<Point3> pts) {
  PointCloud c;
  c.points = std::move(pts);
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

RigidTransform about_z(double degrees, Vec3 t) {
  const double a = degrees * std::numbers::pi / 180.0;
  RigidTransform r;
  r.rotation = {{{std::cos(a), -std::sin(a), 0}, {std::sin(a), std::cos(a), 0}, {0, 0, 1}}};
  r.translation = t;
  return r;
}

double scan_chamfer(const PointCloud& p, const PointCloud& q) {
  auto one_way = [](const PointCloud& a, const PointCloud& b) {
    double s = 0.0;
    for (const auto& x : a.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : b.points) best = std::min(best, squared_distance(x, y));
      s += best;
    }
    return s / static_cast<double>(a.size());
  };
  return one_way(p, q) + one_way(q, p);
}

}  // namespace

TEST_CASE("f1 score") {
  const PointCloud a = testing::random_cloud(50, 1);
  const F1Score same = f1_score(a, a, 0.01);
  CHECK(same.precision == 100.0);
  CHECK(same.recall == 100.0);
  CHECK(same.f1 == 100.0);

  PointCloud far = a;
  for (auto& p : far.points) p += Vec3{10, 0, 0};
  const F1Score none = f1_score(a, far, 0.1);
  CHECK(none.f1 == 0.0);

  const F1Score half = f1_score(cloud_of({{0, 0, 0}, {5, 0, 0}}), cloud_of({{0, 0, 0}}), 0.1);
  CHECK(half.precision == 50.0);
  CHECK(half.recall == 100.0);
  CHECK(half.f1 == doctest::Approx(200.0 / 3.0).epsilon(1e-12));

  const PointCloud b = testing::random_cloud(70, 2);
  const F1Score ab = f1_score(a, b, 0.1), ba = f1_score(b, a, 0.1);
  CHECK(ab.precision == ba.recall);
  CHECK(ab.recall == ba.precision);
  CHECK(ab.f1 == ba.f1);
  CHECK(code_of([&] { f1_score(PointCloud{}, a, 0.1); }) == Errc::EmptyCloud);
}

TEST_CASE("normal cosine") {
  const PointCloud a = testing::with_random_normals(testing::random_cloud(40, 3), 4);
  CHECK(normal_cosine(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  PointCloud p = cloud_of({{0, 0, 0}});
  p.normals = {{0, 0, 1}};
  PointCloud q = p;
  q.normals = {{1, 0, 0}};
  CHECK(normal_cosine(p, q) == 0.0);

  const PointCloud b = testing::with_random_normals(testing::random_cloud(60, 5), 6);
  double s = 0.0;
  auto scan = [](const Point3& x, const PointCloud& c) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.size(); ++i)
      if (squared_distance(x, c.points[i]) < squared_distance(x, c.points[best])) best = i;
    return best;
  };
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(dot(a.normals[i], b.normals[scan(a.points[i], b)]));
  for (std::size_t i = 0; i < b.size(); ++i) s += std::abs(dot(b.normals[i], a.normals[scan(b.points[i], a)]));
  CHECK(normal_cosine(a, b) == doctest::Approx(s / 100.0).epsilon(1e-13));
  CHECK(code_of([&] { normal_cosine(testing::random_cloud(4, 1), a); }) == Errc::MissingNormals);
}

TEST_CASE("icp recovers a known transform") {
  const PointCloud p = testing::random_cloud(100, 7);
  const IcpResult self = icp_align(p, p, 50, 1e-12);
  CHECK(rotation_angle(self.transform.rotation) < 1e-12);
  CHECK(self.chamfer == doctest::Approx(0.0));

  const RigidTransform truth = about_z(20.0, {0.3, -0.1, 0.2});
  const PointCloud q = truth.apply(p);
  const IcpResult r = icp_align(p, q, 100, 1e-14);
  CHECK(rotation_distance(r.transform, truth) < 1e-6);
  CHECK(norm(r.transform.translation - truth.translation) < 1e-6);
  CHECK(r.chamfer < 1e-12);
  for (std::size_t i = 1; i < r.mse_history.size(); ++i) CHECK(r.mse_history[i] <= r.mse_history[i - 1] + 1e-20);

  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) {
      double rtr = 0.0;
      for (int m = 0; m < 3; ++m) rtr += r.transform.rotation[m][k] * r.transform.rotation[m][j];
      CHECK(rtr == doctest::Approx(k == j ? 1.0 : 0.0).epsilon(1e-9));
    }

  CHECK(code_of([] { icp_align(cloud_of({{0, 0, 0}, {1, 0, 0}}), cloud_of({{0, 0, 0}, {1, 0, 0}}), 10, 1e-9); }) ==
        Errc::DegenerateConfiguration);
  const PointCloud line = cloud_of({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}});
  CHECK(code_of([&] { icp_align(line, line, 10, 1e-9); }) == Errc::DegenerateConfiguration);
}

TEST_CASE("rotation helpers") {
  CHECK(rotation_angle(about_z(20.0, {}).rotation) == doctest::Approx(20.0 * std::numbers::pi / 180.0).epsilon(1e-12));
  CHECK(rotation_angle(about_z(1e-7, {}).rotation) == doctest::Approx(1e-7 * std::numbers::pi / 180.0).epsilon(1e-6));
  const RigidTransform a = about_z(10.0, {1, 0, 0}), b = about_z(25.0, {0, 2, 0});
  const Point3 x{0.3, 0.7, -0.2};
  CHECK(distance(a.compose(b).apply(x), a.apply(b.apply(x))) < 1e-12);
}

TEST_CASE("protocol scaling") {
  const Mesh cube = testing::unit_cube();
  const Mesh m = apply_protocol_scaling(cube, Protocol::MeshRcnn);
  const BoundingBox bb = bounding_box(m.vertices);
  const Vec3 e = bb.extent();
  CHECK(std::max({e.x, e.y, e.z}) == 10.0);
  CHECK(apply_protocol_scaling(m, Protocol::MeshRcnn) == m);

  const Mesh torus = uv_torus(1.0, 0.3, 17, 9);
  const Mesh t10 = apply_protocol_scaling(torus, Protocol::MeshRcnn);
  const Vec3 te = bounding_box(t10.vertices).extent();
  CHECK(std::max({te.x, te.y, te.z}) == doctest::Approx(10.0).epsilon(1e-15));

  const Mesh p = apply_protocol_scaling(torus, Protocol::Pixel2Mesh);
  for (std::size_t i = 0; i < torus.vertices.size(); ++i) CHECK(p.vertices[i] == torus.vertices[i] * 0.57);
  CHECK(apply_protocol_scaling(torus, Protocol::TmNet) == torus);
  CHECK(apply_protocol_scaling(torus, Protocol::Skeleton) == torus);
  CHECK(code_of([] { apply_protocol_scaling(Mesh{}, Protocol::MeshRcnn); }) == Errc::EmptyMesh);
}

TEST_CASE("protocol names and radii") {
  CHECK(parse_protocol("pixel2mesh") == Protocol::Pixel2Mesh);
  CHECK(to_string(Protocol::MeshRcnn) == "meshrcnn");
  CHECK(default_radii(Protocol::Pixel2Mesh) == std::vector<double>{0.1, 0.2});
  CHECK(default_radii(Protocol::MeshRcnn) == std::vector<double>{0.1, 0.3, 0.5});
  CHECK(code_of([] { parse_protocol("voxels"); }) == Errc::ConfigError);
}

TEST_CASE("identical meshes are a fixed point under every protocol") {
  const Mesh m = testing::jitter(icosphere(2), 0.02, 9);
  for (Protocol pr : {Protocol::Pixel2Mesh, Protocol::MeshRcnn, Protocol::TmNet, Protocol::Skeleton}) {
    EvalOptions o;
    o.n_samples = 2000;
    o.seed = 3;
    const EvalReport r = evaluate(m, m, pr, o);
    CHECK(r.chamfer == doctest::Approx(0.0).epsilon(1e-12));
    for (const auto& [radius, f] : r.f1) CHECK(f == 100.0);
    CHECK(r.normal_cosine == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("evaluate matches an independent scan") {
  const Mesh gt = icosphere(2);
  Mesh pred = gt;
  for (auto& v : pred.vertices) v += Vec3{0.05, 0, 0};
  EvalOptions o;
  o.n_samples = 800;
  o.seed = 21;
  const EvalReport r = evaluate(pred, gt, Protocol::MeshRcnn, o);
  const double f = 10.0 / 2.0;  // icosphere bbox longest edge is 2
  const PointCloud ps = sample_surface(scale_mesh(pred, f), 800, 21);
  const PointCloud gs = sample_surface(scale_mesh(gt, f), 800, 21);
  CHECK(r.chamfer == doctest::Approx(scan_chamfer(ps, gs)).epsilon(1e-12));
  CHECK(r.f1.size() == 3);
}

TEST_CASE("tmnet aligns a rigidly moved copy") {
  const Mesh gt = testing::jitter(icosphere(2), 0.05, 10);
  const RigidTransform t = about_z(8.0, {0.05, -0.03, 0.02});
  Mesh pred = gt;
  for (auto& v : pred.vertices) v = t.apply(v);
  EvalOptions o;
  o.n_samples = 1500;
  o.seed = 2;
  o.icp_max_iters = 200;
  CHECK(evaluate(pred, gt, Protocol::TmNet, o).chamfer < 1e-6);
}

TEST_CASE("aggregation") {
  EvalReport a, b;
  a.chamfer = 1.0;
  a.f1[0.1] = 50.0;
  a.per_class["chair"] = 1.0;
  b.chamfer = 3.0;
  b.f1[0.1] = 70.0;
  b.per_class["chair"] = 3.0;
  const EvalReport m = aggregate({a, b}, Protocol::Skeleton);
  CHECK(m.chamfer == 2.0);
  CHECK(m.f1.at(0.1) == 60.0);
  CHECK(m.per_class.at("chair") == 2.0);
}
