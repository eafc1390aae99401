#include "alphaforge/alphashape.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "alphaforge/error.hpp"
#include "predicates.hpp"

namespace alphaforge {

namespace tau_presets {

std::vector<double> smooth() { return {0.05, 0.085, 0.11}; }

std::vector<double> pretty() {
  std::vector<double> out;
  for (int i = -12; i <= 11; ++i) out.push_back(0.15 + i / 50.0);
  return out;
}

}  // namespace tau_presets

std::vector<Tetrahedron> filter_tetrahedra(const DelaunayComplex& complex, double tau) {
  if (!(tau > 0.0)) throw Error(Errc::ConfigError, "tau must be positive");
  std::vector<Tetrahedron> kept;
  for (const auto& t : complex.tetrahedra) {
    if (t.circumradius <= tau) kept.push_back(t);
  }
  return kept;
}

ExtractedSurface extract_boundary_faces(std::span<const Tetrahedron> tets, const PointCloud& points) {
  if (tets.empty()) throw Error(Errc::EmptySelection, "no tetrahedra to extract faces from");

  // Outward faces of a positively oriented tetrahedron, indexed by the opposite vertex.
  static constexpr std::array<std::array<int, 3>, 4> kOutward{{{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}}};

  struct Slot {
    Face face;
    int count = 0;
    std::size_t order = 0;
  };
  std::map<std::array<std::uint32_t, 3>, Slot> faces;
  std::size_t order = 0;
  for (const auto& t : tets) {
    const auto& p = points.points;
    std::array<std::uint32_t, 4> v = t.v;
    if (predicates::orient3d(p[v[0]], p[v[1]], p[v[2]], p[v[3]]) < 0) std::swap(v[2], v[3]);
    for (const auto& tpl : kOutward) {
      const Face f{v[tpl[0]], v[tpl[1]], v[tpl[2]]};
      std::array<std::uint32_t, 3> key{f.a, f.b, f.c};
      std::sort(key.begin(), key.end());
      auto [it, inserted] = faces.try_emplace(key, Slot{f, 0, order});
      if (inserted) ++order;
      ++it->second.count;
    }
  }

  std::vector<const Slot*> boundary;
  for (const auto& [key, slot] : faces) {
    if (slot.count == 1) boundary.push_back(&slot);
  }
  std::sort(boundary.begin(), boundary.end(),
            [](const Slot* a, const Slot* b) { return a->order < b->order; });

  std::vector<std::uint32_t> referenced;
  for (const auto* s : boundary) {
    referenced.insert(referenced.end(), {s->face.a, s->face.b, s->face.c});
  }
  std::sort(referenced.begin(), referenced.end());
  referenced.erase(std::unique(referenced.begin(), referenced.end()), referenced.end());

  ExtractedSurface out;
  out.source_index = referenced;
  out.mesh.vertices.reserve(referenced.size());
  for (auto i : referenced) out.mesh.vertices.push_back(points.points[i]);
  auto remap = [&](std::uint32_t i) {
    return static_cast<std::uint32_t>(std::lower_bound(referenced.begin(), referenced.end(), i) -
                                      referenced.begin());
  };
  out.mesh.faces.reserve(boundary.size());
  for (const auto* s : boundary) {
    out.mesh.faces.push_back({remap(s->face.a), remap(s->face.b), remap(s->face.c)});
  }
  return out;
}

ExtractedSurface triangulate_surface(const DelaunayComplex& complex, double tau) {
  const auto kept = filter_tetrahedra(complex, tau);
  if (kept.empty()) {
    throw Error(Errc::EmptyMesh, "every tetrahedron exceeds the circumradius threshold");
  }
  return extract_boundary_faces(kept, complex.points);
}

ExtractedSurface triangulate_surface(const PointCloud& points, double tau) {
  if (!(tau > 0.0)) throw Error(Errc::ConfigError, "tau must be positive");
  return triangulate_surface(delaunay_complex(points), tau);
}

Mesh triangulate(const PointCloud& points, double tau) {
  return triangulate_surface(points, tau).mesh;
}

}  // namespace alphaforge
