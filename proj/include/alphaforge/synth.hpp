#pragma once

// Synthetic shapes with known topology: analytic samples plus a reference
// triangulation whose Euler characteristic is fixed by construction.

#include <cstdint>
#include <string_view>

#include "alphaforge/geometry.hpp"

namespace alphaforge {

enum class Shape { Sphere, Torus, Box, Stacked };

Shape parse_shape(std::string_view name);
std::string_view to_string(Shape s);

struct SyntheticSpec {
  Shape shape = Shape::Sphere;
  std::size_t n = 2000;
  double sigma = 0.0;  // Gaussian noise along the normal
  std::uint64_t seed = 0;
  double major_radius = 1.0;   // torus only
  double minor_radius = 0.25;  // torus only

  /// Throws ConfigError on n == 0, negative or non-finite sigma, or a torus
  /// without 0 < minor < major.
  void validate() const;
};

struct SyntheticShape {
  PointCloud cloud;  // with unit normals
  Mesh reference;
};

/// sphere: unit sphere at the origin; torus: about the z axis; box: unit cube
/// centred at the origin; stacked: a 2.5 x 1.5 x 0.2 plate pierced by two
/// square 0.5 x 0.5 holes (genus 2). Reference Euler characteristics are 2, 0,
/// 2 and -2.
SyntheticShape synth(const SyntheticSpec& spec);

/// Regular icosahedron refined `subdivisions` times by midpoint splits, with
/// vertices projected onto the sphere.
Mesh icosphere(int subdivisions, double radius = 1.0);

/// Quad grid on the torus split into triangles; `nu` steps around the axis,
/// `nv` around the tube.
Mesh uv_torus(double major_radius, double minor_radius, int nu, int nv);

}  // namespace alphaforge
