#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "alphaforge/geometry.hpp"

namespace alphaforge {

/// Weights of the overall reconstruction loss
///   L = l1*logCMD + l2*CMD + l3*LR + l4*EL + l5*NC + l6*NL
/// plus the log-Chamfer offset `mu` and the reward radius `nu`.
struct LossWeights {
  double lambda1 = 1.0;  // log-Chamfer
  double lambda2 = 1.0;  // Chamfer
  double lambda3 = 0.0;  // Laplacian regularizer against the baseline
  double lambda4 = 0.0;  // edge length
  double lambda5 = 0.0;  // normal consistency
  double lambda6 = 0.0;  // normal loss
  double mu = 1e-4;
  double nu = 1e-4;

  /// l2=1, l3=0.5, l4=0.15, l5=1e-3, l6=1e-4, nu=1e-4; the log-Chamfer term is off.
  static LossWeights smooth();
  /// l2=1, l4=0.2, l3=l5=l6=0, nu=1e-4; the log-Chamfer term is off.
  static LossWeights pretty();
  /// Throws ConfigError unless mu, nu > 0 and every lambda is finite and >= 0.
  void validate() const;
};

LossWeights loss_preset(std::string_view name);

struct LossBreakdown {
  double logcmd = 0.0;
  double cmd = 0.0;
  double laplacian_reg = 0.0;
  double edge_len = 0.0;
  double normal_consistency = 0.0;
  double normal_loss = 0.0;
  double total = 0.0;
};

// Point-set terms. Nearest-neighbour ties resolve to the lowest index; the
// gradients hold those assignments fixed.

/// mean_p min_q |p-q|^2 + mean_q min_p |p-q|^2. Throws EmptyCloud.
double chamfer(const PointCloud& p, const PointCloud& q);
/// d chamfer / d p for every p.
std::vector<Vec3> chamfer_grad(const PointCloud& p, const PointCloud& q);

/// sum_p log10(min_q |p-q|^2 + mu) + sum_q log10(min_p |p-q|^2 + mu). Sums, not means.
double log_chamfer(const PointCloud& p, const PointCloud& q, double mu);
std::vector<Vec3> log_chamfer_grad(const PointCloud& p, const PointCloud& q, double mu);

/// Pooled mean over both match directions of 1 - |cos(n_p, n_q)|.
/// Throws MissingNormals / EmptyCloud.
double normal_loss(const PointCloud& p, const PointCloud& q);

// Mesh terms.

inline constexpr double kCotangentClamp = 50.0;

/// Cotangent-weighted Laplacian coordinates sum_j w_ij (v_i - v_j),
/// w_ij = (cot a + cot b)/2 clamped to [-50, 50]. Throws IsolatedVertex.
std::vector<Vec3> laplacian_coords(const Mesh& mesh);

/// Mean over vertices of |LO_M(i) - LO_T(i)|^2. A vertex without incident faces
/// in one of the meshes contributes a zero Laplacian there.
/// Throws VertexCountMismatch.
double laplacian_reg(const Mesh& mesh, const Mesh& baseline);
std::vector<Vec3> laplacian_reg_grad(const Mesh& mesh, const Mesh& baseline);

/// Sum over face pairs sharing an edge of 1 - n1.n2. Faces with area below
/// 1e-12 have no defined normal and are skipped.
double normal_consistency(const Mesh& mesh);
std::vector<Vec3> normal_consistency_grad(const Mesh& mesh);

/// Mean squared length over unique edges. Throws NoEdges.
double edge_length_reg(const Mesh& mesh);
std::vector<Vec3> edge_length_reg_grad(const Mesh& mesh);

/// Samples the mesh surface (seeded) and evaluates the weighted sum against
/// `target` (ground-truth samples). Zero-weight terms are skipped together
/// with their preconditions.
LossBreakdown total_loss(const Mesh& mesh, const PointCloud& target, const Mesh& baseline,
                         const LossWeights& w, std::size_t n_samples, std::uint64_t seed);

struct LossAndGradient {
  LossBreakdown loss;
  std::vector<Vec3> gradient;  // d total / d vertex
};

/// Analytic gradient of total_loss with respect to vertex positions. Sample
/// positions are differentiated through their (fixed) face and barycentric
/// weights; sample normals through their face's unit normal.
LossAndGradient total_loss_grad(const Mesh& mesh, const PointCloud& target, const Mesh& baseline,
                                const LossWeights& w, std::size_t n_samples, std::uint64_t seed);

}  // namespace alphaforge
