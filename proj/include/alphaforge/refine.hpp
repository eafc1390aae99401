#pragma once

// Baseline construction and refinement. Refinement optimizes one free offset
// per vertex by gradient descent on the reconstruction loss, with vertices at
// v + tanh(o) so that a stage moves no coordinate by 1 or more. This replaces
// a learned offset predictor: offsets are fitted per shape instead of inferred.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "alphaforge/geometry.hpp"
#include "alphaforge/loss.hpp"

namespace alphaforge {

struct TaubinConfig {
  double lambda = 0.5;
  double mu_shrink = -0.53;
  int iterations = 10;

  /// Throws ConfigError unless 0 < lambda < 1, mu_shrink < 0, |mu_shrink| > lambda
  /// and iterations >= 0.
  void validate() const;
};

/// Alternating lambda / mu_shrink passes of the uniform umbrella operator.
/// Isolated vertices stay put.
Mesh taubin_smooth(const Mesh& mesh, const TaubinConfig& cfg);

/// Lambda-only umbrella smoothing (shrinks).
Mesh laplacian_smooth(const Mesh& mesh, double lambda, int iterations);

/// triangulate -> Taubin -> triangulate the smoothed vertices again. The
/// result keeps every smoothed vertex in its original order, so it indexes
/// like the first triangulation even where the second one leaves vertices
/// unreferenced. Throws EmptyMesh from either triangulation.
Mesh build_baseline(const PointCloud& points, double tau, const TaubinConfig& taubin);

/// Midpoint subdivision: original vertices first, then one vertex per unique
/// edge in unique_edges order; each face becomes four.
Mesh subdivide(const Mesh& mesh);

struct RefineConfig {
  int stages = 2;
  int iters_per_stage = 100;
  double step_size = 0.05;
  LossWeights weights = LossWeights::smooth();
  bool subdivide_between_stages = false;
  std::size_t n_samples = 2000;

  /// Throws ConfigError on stages < 1, iters_per_stage < 0, step_size <= 0 or
  /// n_samples == 0, and on invalid weights.
  void validate() const;
};

struct TraceEntry {
  int stage = 0;
  int iteration = 0;
  LossBreakdown loss;
};

struct RefineResult {
  Mesh mesh;
  std::vector<TraceEntry> trace;
  std::vector<double> stage_displacement;  // max |offset| per stage, < 1
};

/// Runs cfg.stages stages of cfg.iters_per_stage gradient steps. Each stage
/// samples the surface with one fixed seed, so its samples move with the
/// vertices. Offsets are baked in at the end of each stage. With
/// subdivide_between_stages, mesh and baseline are both subdivided over the
/// mesh's connectivity before every stage after the first.
/// Throws NonFinite when a loss or gradient stops being finite, and
/// VertexCountMismatch when a Laplacian term is active and the baseline does
/// not match the mesh.
RefineResult refine_mesh(const Mesh& initial, const PointCloud& gt_samples, const Mesh& baseline,
                         const RefineConfig& cfg, std::uint64_t seed);

/// Columns: stage, iteration, logcmd, cmd, laplacian_reg, edge_len,
/// normal_consistency, normal_loss, total.
void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace);

}  // namespace alphaforge
