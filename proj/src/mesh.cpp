#include "alphaforge/mesh.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <unordered_map>

#include "alphaforge/error.hpp"

namespace alphaforge {

namespace {

std::uint64_t edge_key(const Edge& e) {
  return (static_cast<std::uint64_t>(e.first) << 32) | e.second;
}

}  // namespace

void validate(const PointCloud& cloud) {
  for (const auto& p : cloud.points) {
    if (!is_finite(p)) throw Error(Errc::InvalidMesh, "non-finite point coordinate");
  }
  if (!cloud.normals.empty()) {
    if (cloud.normals.size() != cloud.points.size()) {
      throw Error(Errc::InvalidMesh, "normal count differs from point count");
    }
    for (const auto& n : cloud.normals) {
      if (!is_finite(n) || std::abs(norm(n) - 1.0) > 1e-9) {
        throw Error(Errc::InvalidMesh, "normal is not unit length");
      }
    }
  }
}

void validate(const Mesh& mesh) {
  for (const auto& v : mesh.vertices) {
    if (!is_finite(v)) throw Error(Errc::InvalidMesh, "non-finite vertex coordinate");
  }
  const auto n = mesh.vertices.size();
  std::set<std::array<std::uint32_t, 3>> seen;
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    const Face& f = mesh.faces[i];
    if (f.a >= n || f.b >= n || f.c >= n) {
      throw Error(Errc::InvalidMesh, "face " + std::to_string(i) + " index out of range");
    }
    if (f.a == f.b || f.b == f.c || f.a == f.c) {
      throw Error(Errc::InvalidMesh, "face " + std::to_string(i) + " repeats a vertex");
    }
    std::array<std::uint32_t, 3> key{f.a, f.b, f.c};
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) {
      throw Error(Errc::InvalidMesh, "face " + std::to_string(i) + " duplicates another face");
    }
  }
}

std::vector<Edge> unique_edges(const Mesh& mesh) {
  std::vector<Edge> out;
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  index.reserve(mesh.faces.size() * 2);
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      const Edge e = Edge::make(f[k], f[(k + 1) % 3]);
      if (index.emplace(edge_key(e), static_cast<std::uint32_t>(out.size())).second) {
        out.push_back(e);
      }
    }
  }
  return out;
}

long euler_characteristic(const Mesh& mesh) {
  return static_cast<long>(mesh.vertices.size()) - static_cast<long>(unique_edges(mesh).size()) +
         static_cast<long>(mesh.faces.size());
}

EdgeFaces edge_face_incidence(const Mesh& mesh) {
  EdgeFaces out;
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  index.reserve(mesh.faces.size() * 2);
  for (std::uint32_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    for (int k = 0; k < 3; ++k) {
      const Edge e = Edge::make(f[k], f[(k + 1) % 3]);
      auto [it, inserted] = index.emplace(edge_key(e), static_cast<std::uint32_t>(out.edges.size()));
      if (inserted) {
        out.edges.push_back(e);
        out.faces.emplace_back();
      }
      out.faces[it->second].push_back(fi);
    }
  }
  return out;
}

std::vector<Edge> boundary_edges(const Mesh& mesh) {
  const auto inc = edge_face_incidence(mesh);
  std::vector<Edge> out;
  for (std::size_t i = 0; i < inc.edges.size(); ++i) {
    if (inc.faces[i].size() == 1) out.push_back(inc.edges[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Vec3 face_cross(const Mesh& mesh, const Face& f) {
  const Point3& a = mesh.vertices[f.a];
  return cross(mesh.vertices[f.b] - a, mesh.vertices[f.c] - a);
}

double face_area(const Mesh& mesh, const Face& f) { return 0.5 * norm(face_cross(mesh, f)); }

std::vector<Vec3> face_normals(const Mesh& mesh) {
  std::vector<Vec3> out;
  out.reserve(mesh.faces.size());
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    const Vec3 c = face_cross(mesh, mesh.faces[i]);
    const double len = norm(c);
    if (0.5 * len < kDegenerateArea) {
      throw Error(Errc::DegenerateFace, "face " + std::to_string(i) + " has zero area");
    }
    out.push_back(c / len);
  }
  return out;
}

double enclosed_volume(const Mesh& mesh) {
  double vol = 0.0;
  for (const auto& f : mesh.faces) {
    vol += dot(mesh.vertices[f.a], cross(mesh.vertices[f.b], mesh.vertices[f.c]));
  }
  return vol / 6.0;
}

std::vector<std::vector<std::uint32_t>> vertex_neighbors(const Mesh& mesh) {
  std::vector<std::vector<std::uint32_t>> out(mesh.vertices.size());
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      out[f[k]].push_back(f[(k + 1) % 3]);
      out[f[k]].push_back(f[(k + 2) % 3]);
    }
  }
  for (auto& ring : out) {
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
  }
  return out;
}

BoundingBox bounding_box(std::span<const Point3> points) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BoundingBox box{{inf, inf, inf}, {-inf, -inf, -inf}};
  for (const auto& p : points) {
    for (int k = 0; k < 3; ++k) {
      box.min[k] = std::min(box.min[k], p[k]);
      box.max[k] = std::max(box.max[k], p[k]);
    }
  }
  return box;
}

}  // namespace alphaforge
