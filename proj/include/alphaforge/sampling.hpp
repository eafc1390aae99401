#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "alphaforge/geometry.hpp"

namespace alphaforge {

/// Default sample counts.
inline constexpr std::size_t kRewardSamples = 3000;
inline constexpr std::size_t kMetricSamples = 10000;

/// A surface sample together with the face and barycentric weights that
/// produced it, so position derivatives can be pushed back to vertices.
struct SurfaceSamples {
  PointCloud cloud;  // always carries normals
  std::vector<std::uint32_t> face;
  std::vector<std::array<double, 3>> bary;
};

/// Area-uniform samples. Sample i draws counters 3i..3i+2 of the stream
/// `seed`: one for the face (binary search on cumulative area), two for the
/// square-root barycentric map. Throws NoSurface if total area < 1e-12.
SurfaceSamples sample_surface_detailed(const Mesh& mesh, std::size_t n, std::uint64_t seed);

PointCloud sample_surface(const Mesh& mesh, std::size_t n, std::uint64_t seed);

}  // namespace alphaforge
