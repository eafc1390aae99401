#include "alphaforge/synth.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <string>

#include "alphaforge/error.hpp"
#include "alphaforge/random.hpp"
#include "alphaforge/refine.hpp"
#include "alphaforge/sampling.hpp"

namespace alphaforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> linspace(double lo, double hi, int cells) {
  std::vector<double> out(cells + 1);
  for (int i = 0; i <= cells; ++i) out[i] = lo + (hi - lo) * i / cells;
  return out;
}

// Boundary of a union of grid cells. Axis-aligned quads between occupied and
// empty cells, each split into two triangles, oriented outward.
Mesh voxel_surface(const std::array<std::vector<double>, 3>& coords,
                   const std::function<bool(int, int, int)>& occupied) {
  const std::array<int, 3> dims{static_cast<int>(coords[0].size()) - 1, static_cast<int>(coords[1].size()) - 1,
                                static_cast<int>(coords[2].size()) - 1};
  auto inside = [&](std::array<int, 3> c) {
    for (int a = 0; a < 3; ++a) {
      if (c[a] < 0 || c[a] >= dims[a]) return false;
    }
    return occupied(c[0], c[1], c[2]);
  };

  Mesh mesh;
  std::map<std::array<int, 3>, std::uint32_t> index;
  auto vertex = [&](std::array<int, 3> g) {
    auto [it, inserted] = index.try_emplace(g, static_cast<std::uint32_t>(mesh.vertices.size()));
    if (inserted) mesh.vertices.push_back({coords[0][g[0]], coords[1][g[1]], coords[2][g[2]]});
    return it->second;
  };

  for (int i = 0; i < dims[0]; ++i) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int k = 0; k < dims[2]; ++k) {
        const std::array<int, 3> cell{i, j, k};
        if (!inside(cell)) continue;
        for (int a = 0; a < 3; ++a) {
          for (int dir : {-1, 1}) {
            auto nb = cell;
            nb[a] += dir;
            if (inside(nb)) continue;
            const int b = (a + 1) % 3, c = (a + 2) % 3;
            std::array<int, 3> g = cell;
            g[a] += dir > 0 ? 1 : 0;
            std::array<std::array<int, 3>, 4> corners{g, g, g, g};
            corners[1][b] += 1;
            corners[2][b] += 1;
            corners[2][c] += 1;
            corners[3][c] += 1;
            std::array<std::uint32_t, 4> q{};
            for (int t = 0; t < 4; ++t) q[t] = vertex(corners[t]);
            if (dir > 0) {
              mesh.faces.push_back({q[0], q[1], q[2]});
              mesh.faces.push_back({q[0], q[2], q[3]});
            } else {
              mesh.faces.push_back({q[0], q[2], q[1]});
              mesh.faces.push_back({q[0], q[3], q[2]});
            }
          }
        }
      }
    }
  }
  return mesh;
}

Mesh box_mesh() {
  const int m = 8;
  const auto s = linspace(-0.5, 0.5, m);
  return voxel_surface({s, s, s}, [](int, int, int) { return true; });
}

Mesh stacked_mesh() {
  // 5 x 3 plate of 0.5 cells, holes at cells (1, 1) and (3, 1), each cell split
  // 4 x 4 in plane and the thickness split in two.
  const int m = 4;
  const auto xs = linspace(-1.25, 1.25, 5 * m);
  const auto ys = linspace(-0.75, 0.75, 3 * m);
  const auto zs = linspace(-0.1, 0.1, 2);
  return voxel_surface({xs, ys, zs}, [](int i, int j, int) {
    const int ci = i / m, cj = j / m;
    return !(cj == 1 && (ci == 1 || ci == 3));
  });
}

}  // namespace

Shape parse_shape(std::string_view name) {
  if (name == "sphere") return Shape::Sphere;
  if (name == "torus") return Shape::Torus;
  if (name == "box") return Shape::Box;
  if (name == "stacked") return Shape::Stacked;
  throw Error(Errc::ConfigError, "unknown shape '" + std::string(name) + "'");
}

std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::Sphere:
      return "sphere";
    case Shape::Torus:
      return "torus";
    case Shape::Box:
      return "box";
    case Shape::Stacked:
      return "stacked";
  }
  return "sphere";
}

void SyntheticSpec::validate() const {
  if (n == 0) throw Error(Errc::ConfigError, "n must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(Errc::ConfigError, "sigma must be >= 0");
  if (shape == Shape::Torus && !(minor_radius > 0.0 && minor_radius < major_radius)) {
    throw Error(Errc::ConfigError, "torus needs 0 < minor radius < major radius");
  }
}

Mesh icosphere(int subdivisions, double radius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Mesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) m = subdivide(m);
  for (auto& v : m.vertices) v = v * (radius / norm(v));
  return m;
}

Mesh uv_torus(double major_radius, double minor_radius, int nu, int nv) {
  Mesh m;
  for (int i = 0; i < nu; ++i) {
    const double u = kTwoPi * i / nu;
    for (int j = 0; j < nv; ++j) {
      const double v = kTwoPi * j / nv;
      const double rho = major_radius + minor_radius * std::cos(v);
      m.vertices.push_back({rho * std::cos(u), rho * std::sin(u), minor_radius * std::sin(v)});
    }
  }
  auto id = [&](int i, int j) { return static_cast<std::uint32_t>((i % nu) * nv + (j % nv)); };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const auto a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      m.faces.push_back({a, b, c});
      m.faces.push_back({a, c, d});
    }
  }
  return m;
}

SyntheticShape synth(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticShape out;
  CounterRng rng(spec.seed);
  auto& cloud = out.cloud;
  cloud.points.reserve(spec.n);
  cloud.normals.reserve(spec.n);

  switch (spec.shape) {
    case Shape::Sphere: {
      out.reference = icosphere(4);
      while (cloud.points.size() < spec.n) {
        const Vec3 g{rng.normal(), rng.normal(), rng.normal()};
        const double len = norm(g);
        if (len < 1e-12) continue;
        cloud.points.push_back(g / len);
        cloud.normals.push_back(g / len);
      }
      break;
    }
    case Shape::Torus: {
      const double big = spec.major_radius, small = spec.minor_radius;
      out.reference = uv_torus(big, small, 64, 32);
      // Area density is proportional to big + small cos v.
      while (cloud.points.size() < spec.n) {
        const double u = kTwoPi * rng.uniform();
        const double v = kTwoPi * rng.uniform();
        if (rng.uniform() * (big + small) > big + small * std::cos(v)) continue;
        const Vec3 n{std::cos(v) * std::cos(u), std::cos(v) * std::sin(u), std::sin(v)};
        const Vec3 c{big * std::cos(u), big * std::sin(u), 0.0};
        cloud.points.push_back(c + small * n);
        cloud.normals.push_back(n);
      }
      break;
    }
    case Shape::Box:
    case Shape::Stacked: {
      out.reference = spec.shape == Shape::Box ? box_mesh() : stacked_mesh();
      cloud = sample_surface(out.reference, spec.n, rng.next_u64());
      break;
    }
  }

  if (spec.sigma > 0.0) {
    CounterRng noise(spec.seed ^ 0xA5A5A5A5A5A5A5A5ULL);
    for (std::size_t i = 0; i < cloud.size(); ++i) cloud.points[i] += (spec.sigma * noise.normal()) * cloud.normals[i];
  }
  return out;
}

}  // namespace alphaforge
