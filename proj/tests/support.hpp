#pragma once

// Fixtures and brute-force oracles shared by the test binaries. Oracles are
// written independently of the library code they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "alphaforge/geometry.hpp"
#include "alphaforge/random.hpp"

namespace testing {

using namespace alphaforge;

inline PointCloud random_cloud(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  CounterRng rng(seed);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) c.points.push_back({scale * rng.uniform(), scale * rng.uniform(), scale * rng.uniform()});
  return c;
}

inline PointCloud with_random_normals(PointCloud c, std::uint64_t seed) {
  CounterRng rng(seed);
  c.normals.clear();
  for (std::size_t i = 0; i < c.size(); ++i) {
    Vec3 n{rng.normal(), rng.normal(), rng.normal()};
    c.normals.push_back(n / norm(n));
  }
  return c;
}

inline Mesh tetrahedron_surface() {
  Mesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.faces = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  return m;
}

inline Mesh unit_cube() {
  Mesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  m.faces = {{0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7}, {0, 1, 5}, {0, 5, 4},
             {1, 2, 6}, {1, 6, 5}, {2, 3, 7}, {2, 7, 6}, {3, 0, 4}, {3, 4, 7}};
  return m;
}

inline Mesh jitter(Mesh m, double sigma, std::uint64_t seed) {
  CounterRng rng(seed);
  for (auto& v : m.vertices) v += sigma * Vec3{rng.normal(), rng.normal(), rng.normal()};
  return m;
}

// V - E + F with edges counted through an ordered set of index pairs.
inline long brute_euler(const Mesh& m) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::set<std::uint32_t> verts;
  for (const auto& f : m.faces) {
    const std::uint32_t v[3] = {f.a, f.b, f.c};
    for (int k = 0; k < 3; ++k) {
      verts.insert(v[k]);
      edges.insert(std::minmax(v[k], v[(k + 1) % 3]));
    }
  }
  return static_cast<long>(verts.size()) - static_cast<long>(edges.size()) + static_cast<long>(m.faces.size());
}

inline double det3(const Vec3& a, const Vec3& b, const Vec3& c) { return dot(a, cross(b, c)); }

// Convex hull volume from every triple whose plane has all points on one side.
inline double brute_hull_volume(const std::vector<Point3>& p) {
  Vec3 centroid;
  for (const auto& x : p) centroid += x;
  centroid = centroid / static_cast<double>(p.size());
  double vol = 0.0;
  const std::size_t n = p.size();
  std::set<std::vector<std::size_t>> seen_planes;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const Vec3 nrm = cross(p[j] - p[i], p[k] - p[i]);
        if (norm(nrm) < 1e-12) continue;
        int pos = 0, neg = 0;
        for (std::size_t l = 0; l < n; ++l) {
          const double s = dot(nrm, p[l] - p[i]);
          if (s > 1e-12) ++pos;
          if (s < -1e-12) ++neg;
        }
        if (pos > 0 && neg > 0) continue;
        // Random inputs have no four coplanar points, so each facet is one triple.
        vol += std::abs(det3(p[i] - centroid, p[j] - centroid, p[k] - centroid)) / 6.0;
      }
    }
  }
  return vol;
}

// Central differences of f with respect to every vertex coordinate.
inline std::vector<Vec3> numeric_gradient(std::vector<Point3> x, const std::function<double(const std::vector<Point3>&)>& f,
                                          double h = 1e-6) {
  std::vector<Vec3> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      const double keep = x[i][a];
      x[i][a] = keep + h;
      const double fp = f(x);
      x[i][a] = keep - h;
      const double fm = f(x);
      x[i][a] = keep;
      g[i][a] = (fp - fm) / (2.0 * h);
    }
  }
  return g;
}

// ||a - b|| / max(||b||, floor) over all components.
inline double relative_error(const std::vector<Vec3>& a, const std::vector<Vec3>& b, double floor = 1e-12) {
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += squared_norm(a[i] - b[i]);
    ref += squared_norm(b[i]);
  }
  return std::sqrt(diff) / std::max(std::sqrt(ref), floor);
}

}  // namespace testing
