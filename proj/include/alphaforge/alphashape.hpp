#pragma once

#include <cstdint>
#include <vector>

#include "alphaforge/delaunay.hpp"
#include "alphaforge/geometry.hpp"

namespace alphaforge {

/// Threshold presets for the circumradius filter.
namespace tau_presets {
/// {0.05, 0.085, 0.11}
std::vector<double> smooth();
/// {0.15 + i/50 : i = -12..11}, 24 values.
std::vector<double> pretty();
}  // namespace tau_presets

/// Tetrahedra with circumradius <= tau, in input order.
std::vector<Tetrahedron> filter_tetrahedra(const DelaunayComplex& complex, double tau);

/// Boundary surface of a tetrahedron set plus the map from output vertex index
/// to the index in the source point list.
struct ExtractedSurface {
  Mesh mesh;
  std::vector<std::uint32_t> source_index;
};

/// Faces used by exactly one tetrahedron, oriented away from that tetrahedron's
/// opposite vertex. Output vertices are the referenced source points in
/// ascending source order. Throws EmptySelection when `tets` is empty.
ExtractedSurface extract_boundary_faces(std::span<const Tetrahedron> tets, const PointCloud& points);

/// Delaunay -> circumradius filter -> boundary extraction. Throws EmptyMesh
/// when no tetrahedron survives the filter.
ExtractedSurface triangulate_surface(const DelaunayComplex& complex, double tau);
ExtractedSurface triangulate_surface(const PointCloud& points, double tau);

/// Mesh-only convenience form of triangulate_surface.
Mesh triangulate(const PointCloud& points, double tau);

}  // namespace alphaforge
