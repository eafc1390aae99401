#include "alphaforge/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "alphaforge/error.hpp"
#include "alphaforge/mesh.hpp"
#include "alphaforge/random.hpp"

namespace alphaforge {

SurfaceSamples sample_surface_detailed(const Mesh& mesh, std::size_t n, std::uint64_t seed) {
  SurfaceSamples out;
  if (n == 0) return out;

  std::vector<double> cumulative(mesh.faces.size());
  std::vector<Vec3> normals(mesh.faces.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    const Vec3 c = face_cross(mesh, mesh.faces[i]);
    const double len = norm(c);
    total += 0.5 * len;
    cumulative[i] = total;
    normals[i] = len > 0.0 ? c / len : Vec3{};
  }
  if (!(total >= kDegenerateArea)) throw Error(Errc::NoSurface, "mesh has no surface area");

  out.cloud.points.resize(n);
  out.cloud.normals.resize(n);
  out.face.resize(n);
  out.bary.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t base = 3 * static_cast<std::uint64_t>(i);
    const double target = CounterRng::uniform_at(seed, base) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (it == cumulative.end()) --it;
    const auto fi = static_cast<std::uint32_t>(it - cumulative.begin());
    const double s1 = std::sqrt(CounterRng::uniform_at(seed, base + 1));
    const double r2 = CounterRng::uniform_at(seed, base + 2);
    const std::array<double, 3> w{1.0 - s1, s1 * (1.0 - r2), s1 * r2};
    const Face& f = mesh.faces[fi];
    out.cloud.points[i] =
        w[0] * mesh.vertices[f.a] + w[1] * mesh.vertices[f.b] + w[2] * mesh.vertices[f.c];
    out.cloud.normals[i] = normals[fi];
    out.face[i] = fi;
    out.bary[i] = w;
  }
  return out;
}

PointCloud sample_surface(const Mesh& mesh, std::size_t n, std::uint64_t seed) {
  return sample_surface_detailed(mesh, n, seed).cloud;
}

}  // namespace alphaforge
