#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alphaforge/geometry.hpp"

namespace alphaforge {

enum class Protocol { Pixel2Mesh, MeshRcnn, TmNet, Skeleton };

Protocol parse_protocol(std::string_view name);
std::string_view to_string(Protocol p);

/// Default F1 radii: pixel2mesh {0.1, 0.2}; meshrcnn {0.1, 0.3, 0.5}; tmnet and
/// skeleton {0.1}.
std::vector<double> default_radii(Protocol p);

struct F1Score {
  double precision = 0.0;  // percent
  double recall = 0.0;     // percent
  double f1 = 0.0;         // percent
};

/// Precision: share of p with a q within r. Recall: share of q with a p within r.
F1Score f1_score(const PointCloud& p, const PointCloud& q, double r);

/// Pooled mean over both match directions of |cos(n_p, n_q)|.
double normal_cosine(const PointCloud& p, const PointCloud& q);

struct RigidTransform {
  std::array<std::array<double, 3>, 3> rotation{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  Vec3 translation;

  Point3 apply(const Point3& p) const;
  Vec3 rotate(const Vec3& v) const;
  /// this after other: x -> this(other(x)).
  RigidTransform compose(const RigidTransform& other) const;
  PointCloud apply(const PointCloud& cloud) const;
};

/// Rotation angle (radians) of R, robust near zero.
double rotation_angle(const std::array<std::array<double, 3>, 3>& r);

/// Rotation angle of a * b^T, i.e. the angular distance between two rotations.
double rotation_distance(const RigidTransform& a, const RigidTransform& b);

struct IcpResult {
  RigidTransform transform;           // maps p onto q
  double chamfer = 0.0;               // after alignment
  std::vector<double> mse_history;    // one entry per correspondence pass
};

/// Point-to-point ICP from the identity, Procrustes (SVD) fit per iteration.
/// Stops at zero error, when the mean-squared error improves by less than
/// `tol`, or after `max_iters`; returns the lowest-error transform seen. Throws DegenerateConfiguration for fewer than 3 points or a
/// rank-deficient configuration.
IcpResult icp_align(const PointCloud& p, const PointCloud& q, int max_iters, double tol);

/// pixel2mesh scales by 0.57 about the origin, meshrcnn so that the longest
/// bounding-box edge is 10; tmnet and skeleton leave the mesh as-is.
double protocol_scale_factor(const Mesh& mesh, Protocol protocol);
Mesh apply_protocol_scaling(const Mesh& mesh, Protocol protocol);
Mesh scale_mesh(const Mesh& mesh, double factor);

struct EvalReport {
  std::string protocol;
  double chamfer = 0.0;
  std::map<double, double> f1;  // radius -> percent
  double normal_cosine = 0.0;
  std::map<std::string, double> per_class;
};

struct EvalOptions {
  std::size_t n_samples = 10000;
  std::uint64_t seed = 0;
  std::vector<double> radii;  // empty: protocol defaults
  std::optional<std::string> class_label;
  int icp_max_iters = 50;
  double icp_tol = 1e-12;
};

/// Scales both meshes by the factor the protocol derives from `gt`, samples
/// both with the same seed, aligns with ICP for tmnet, and reports Chamfer,
/// F1 at each radius and normal cosine.
EvalReport evaluate(const Mesh& pred, const Mesh& gt, Protocol protocol, const EvalOptions& opts);

/// Averages per-instance reports; per_class holds the mean Chamfer of every
/// labelled class.
EvalReport aggregate(const std::vector<EvalReport>& reports, Protocol protocol);

}  // namespace alphaforge
