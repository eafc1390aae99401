#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "alphaforge/geometry.hpp"

namespace alphaforge {

struct Sphere {
  Point3 center;
  double radius = 0.0;
};

/// Circumsphere of four affinely independent points. Throws
/// DegenerateTetrahedron when |det[p1-p0, p2-p0, p3-p0]| <= 1e-12 * L^3 with L
/// the longest edge from p0.
Sphere circumsphere(const Point3& p0, const Point3& p1, const Point3& p2, const Point3& p3);

struct Tetrahedron {
  std::array<std::uint32_t, 4> v{};
  Point3 circumcenter;
  double circumradius = 0.0;
};

/// Builds a Tetrahedron (with cached circumsphere) from four indices into `points`.
Tetrahedron make_tetrahedron(std::span<const Point3> points, std::array<std::uint32_t, 4> v);

struct DelaunayComplex {
  PointCloud points;
  std::vector<Tetrahedron> tetrahedra;
};

/// 3D Delaunay tetrahedralization by incremental (Bowyer-Watson) insertion in
/// input order. The unbounded side is represented by a symbolic vertex at
/// infinity, so the result always covers the convex hull exactly. Predicates
/// are exact; points lying exactly on a circumsphere are treated as outside it.
/// Repeated coordinates are inserted once; later copies are not referenced.
///
/// Finite tetrahedra are emitted positively oriented (orient3d > 0).
/// Throws TooFewPoints (< 4 points) and DegenerateInput (all points coplanar).
DelaunayComplex delaunay_complex(const PointCloud& points);

}  // namespace alphaforge
