#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "alphaforge/geometry.hpp"

namespace alphaforge {

/// Throws Error(InvalidMesh) if a face index is out of range, a face repeats an
/// index, two faces share the same unordered index triple, or a coordinate is
/// not finite.
void validate(const Mesh& mesh);

/// Unique unordered edges in order of first appearance (face order, then a-b,
/// b-c, c-a within a face).
std::vector<Edge> unique_edges(const Mesh& mesh);

/// V - E + F. Empty mesh gives 0.
long euler_characteristic(const Mesh& mesh);

/// Edges incident to exactly one face, sorted.
std::vector<Edge> boundary_edges(const Mesh& mesh);

/// For each unique edge (same order as unique_edges) the indices of incident faces.
struct EdgeFaces {
  std::vector<Edge> edges;
  std::vector<std::vector<std::uint32_t>> faces;
};
EdgeFaces edge_face_incidence(const Mesh& mesh);

/// Unnormalized (b-a)x(c-a); half its norm is the face area.
Vec3 face_cross(const Mesh& mesh, const Face& f);
double face_area(const Mesh& mesh, const Face& f);

/// Unit normals, one per face. Throws DegenerateFace on faces with area < 1e-12.
std::vector<Vec3> face_normals(const Mesh& mesh);

/// Signed volume by the divergence theorem. Positive for closed outward-oriented meshes.
double enclosed_volume(const Mesh& mesh);

/// One-ring vertex adjacency (sorted, unique) built from face edges.
std::vector<std::vector<std::uint32_t>> vertex_neighbors(const Mesh& mesh);

struct BoundingBox {
  Point3 min;
  Point3 max;
  Vec3 extent() const { return max - min; }
};
BoundingBox bounding_box(std::span<const Point3> points);

}  // namespace alphaforge
