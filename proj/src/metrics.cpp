#include "alphaforge/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "alphaforge/error.hpp"
#include "alphaforge/knn.hpp"
#include "alphaforge/loss.hpp"
#include "alphaforge/mesh.hpp"
#include "alphaforge/sampling.hpp"

namespace alphaforge {

Protocol parse_protocol(std::string_view name) {
  if (name == "pixel2mesh") return Protocol::Pixel2Mesh;
  if (name == "meshrcnn") return Protocol::MeshRcnn;
  if (name == "tmnet") return Protocol::TmNet;
  if (name == "skeleton") return Protocol::Skeleton;
  throw Error(Errc::ConfigError, "unknown protocol '" + std::string(name) + "'");
}

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::Pixel2Mesh: return "pixel2mesh";
    case Protocol::MeshRcnn: return "meshrcnn";
    case Protocol::TmNet: return "tmnet";
    case Protocol::Skeleton: return "skeleton";
  }
  return "unknown";
}

std::vector<double> default_radii(Protocol p) {
  switch (p) {
    case Protocol::Pixel2Mesh: return {0.1, 0.2};
    case Protocol::MeshRcnn: return {0.1, 0.3, 0.5};
    case Protocol::TmNet:
    case Protocol::Skeleton: return {0.1};
  }
  return {};
}

F1Score f1_score(const PointCloud& p, const PointCloud& q, double r) {
  if (p.empty() || q.empty()) throw Error(Errc::EmptyCloud, "point cloud is empty");
  if (!(r > 0.0)) throw Error(Errc::ConfigError, "radius must be positive");
  const KdTree tq(q.points), tp(p.points);
  const double r2 = r * r;
  std::size_t hit_p = 0, hit_q = 0;
  for (const auto& x : p.points) hit_p += tq.nearest(x).squared_distance <= r2 ? 1 : 0;
  for (const auto& x : q.points) hit_q += tp.nearest(x).squared_distance <= r2 ? 1 : 0;
  F1Score s;
  s.precision = 100.0 * static_cast<double>(hit_p) / static_cast<double>(p.size());
  s.recall = 100.0 * static_cast<double>(hit_q) / static_cast<double>(q.size());
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

double normal_cosine(const PointCloud& p, const PointCloud& q) {
  if (!p.has_normals() || !q.has_normals()) throw Error(Errc::MissingNormals, "normals required");
  return 1.0 - normal_loss(p, q);
}

Point3 RigidTransform::apply(const Point3& p) const { return rotate(p) + translation; }

Vec3 RigidTransform::rotate(const Vec3& v) const {
  const auto& r = rotation;
  return {r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z, r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
          r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z};
}

RigidTransform RigidTransform::compose(const RigidTransform& other) const {
  RigidTransform out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += rotation[i][k] * other.rotation[k][j];
      out.rotation[i][j] = s;
    }
  }
  out.translation = rotate(other.translation) + translation;
  return out;
}

PointCloud RigidTransform::apply(const PointCloud& cloud) const {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(apply(p));
  out.normals.reserve(cloud.normals.size());
  for (const auto& n : cloud.normals) out.normals.push_back(rotate(n));
  return out;
}

double rotation_angle(const std::array<std::array<double, 3>, 3>& r) {
  const double c = 0.5 * (r[0][0] + r[1][1] + r[2][2] - 1.0);
  const Vec3 axis{r[2][1] - r[1][2], r[0][2] - r[2][0], r[1][0] - r[0][1]};
  return std::atan2(0.5 * norm(axis), c);
}

double rotation_distance(const RigidTransform& a, const RigidTransform& b) {
  std::array<std::array<double, 3>, 3> m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) m[i][j] += a.rotation[i][k] * b.rotation[j][k];
    }
  }
  return rotation_angle(m);
}

namespace {

Eigen::Vector3d to_eigen(const Vec3& v) { return {v.x, v.y, v.z}; }

void require_spread(std::span<const Point3> pts, const char* which) {
  if (pts.size() < 3) {
    throw Error(Errc::DegenerateConfiguration, std::string(which) + " needs at least 3 points");
  }
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pts) mean += to_eigen(p);
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) {
    const Eigen::Vector3d d = to_eigen(p) - mean;
    cov += d * d.transpose();
  }
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov);
  const auto s = svd.singularValues();
  if (!(s(1) > 1e-12 * s(0))) {
    throw Error(Errc::DegenerateConfiguration, std::string(which) + " points are collinear");
  }
}

// Least-squares rotation + translation taking src[i] onto dst[i].
RigidTransform procrustes(const std::vector<Point3>& src, const std::vector<Point3>& dst) {
  Eigen::Vector3d ms = Eigen::Vector3d::Zero(), md = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    ms += to_eigen(src[i]);
    md += to_eigen(dst[i]);
  }
  ms /= static_cast<double>(src.size());
  md /= static_cast<double>(src.size());
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    h += (to_eigen(src[i]) - ms) * (to_eigen(dst[i]) - md).transpose();
  }
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto s = svd.singularValues();
  if (!(s(1) > 1e-12 * s(0))) {
    throw Error(Errc::DegenerateConfiguration, "cross-covariance is rank deficient");
  }
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0 ? -1.0 : 1.0;
  const Eigen::Matrix3d r = svd.matrixV() * d * svd.matrixU().transpose();
  const Eigen::Vector3d t = md - r * ms;
  RigidTransform out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out.rotation[i][j] = r(i, j);
  }
  out.translation = {t(0), t(1), t(2)};
  return out;
}

}  // namespace

IcpResult icp_align(const PointCloud& p, const PointCloud& q, int max_iters, double tol) {
  require_spread(p.points, "source");
  require_spread(q.points, "target");
  const KdTree tree(q.points);
  IcpResult out;
  RigidTransform current;
  std::vector<Point3> moved = p.points;
  std::vector<Point3> matched(moved.size());
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    double mse = 0.0;
    for (std::size_t i = 0; i < moved.size(); ++i) {
      const Neighbor nb = tree.nearest(moved[i]);
      matched[i] = q.points[nb.index];
      mse += nb.squared_distance;
    }
    mse /= static_cast<double>(moved.size());
    out.mse_history.push_back(mse);
    const double gain = best - mse;
    // A step that made things worse is discarded.
    if (mse < best) {
      best = mse;
      out.transform = current;
    }
    if (mse == 0.0 || gain < tol) break;
    current = procrustes(moved, matched).compose(current);
    for (std::size_t i = 0; i < moved.size(); ++i) moved[i] = current.apply(p.points[i]);
  }
  PointCloud aligned = out.transform.apply(p);
  out.chamfer = chamfer(aligned, q);
  return out;
}

Mesh scale_mesh(const Mesh& mesh, double factor) {
  Mesh out = mesh;
  for (auto& v : out.vertices) v *= factor;
  return out;
}

double protocol_scale_factor(const Mesh& mesh, Protocol protocol) {
  if (mesh.vertices.empty()) throw Error(Errc::EmptyMesh, "mesh has no vertices");
  switch (protocol) {
    case Protocol::Pixel2Mesh: return 0.57;
    case Protocol::MeshRcnn: {
      const Vec3 e = bounding_box(mesh.vertices).extent();
      const double longest = std::max({e.x, e.y, e.z});
      if (!(longest > 0.0)) throw Error(Errc::EmptyMesh, "mesh has zero extent");
      return 10.0 / longest;
    }
    case Protocol::TmNet:
    case Protocol::Skeleton: return 1.0;
  }
  return 1.0;
}

Mesh apply_protocol_scaling(const Mesh& mesh, Protocol protocol) {
  return scale_mesh(mesh, protocol_scale_factor(mesh, protocol));
}

EvalReport evaluate(const Mesh& pred, const Mesh& gt, Protocol protocol, const EvalOptions& opts) {
  const double factor = protocol_scale_factor(gt, protocol);
  if (pred.vertices.empty()) throw Error(Errc::EmptyMesh, "prediction has no vertices");
  const Mesh sp = scale_mesh(pred, factor);
  const Mesh sg = scale_mesh(gt, factor);
  PointCloud pc = sample_surface(sp, opts.n_samples, opts.seed);
  const PointCloud gc = sample_surface(sg, opts.n_samples, opts.seed);

  EvalReport report;
  report.protocol = std::string(to_string(protocol));
  if (protocol == Protocol::TmNet) {
    const IcpResult icp = icp_align(pc, gc, opts.icp_max_iters, opts.icp_tol);
    pc = icp.transform.apply(pc);
  }
  report.chamfer = chamfer(pc, gc);
  for (double r : opts.radii.empty() ? default_radii(protocol) : opts.radii) {
    report.f1[r] = f1_score(pc, gc, r).f1;
  }
  report.normal_cosine = normal_cosine(pc, gc);
  if (opts.class_label) report.per_class[*opts.class_label] = report.chamfer;
  return report;
}

EvalReport aggregate(const std::vector<EvalReport>& reports, Protocol protocol) {
  EvalReport out;
  out.protocol = std::string(to_string(protocol));
  if (reports.empty()) return out;
  std::map<std::string, std::pair<double, int>> classes;
  for (const auto& r : reports) {
    out.chamfer += r.chamfer;
    out.normal_cosine += r.normal_cosine;
    for (const auto& [radius, f] : r.f1) out.f1[radius] += f;
    for (const auto& [label, c] : r.per_class) {
      classes[label].first += c;
      classes[label].second += 1;
    }
  }
  const auto n = static_cast<double>(reports.size());
  out.chamfer /= n;
  out.normal_cosine /= n;
  for (auto& [radius, f] : out.f1) f /= n;
  for (const auto& [label, acc] : classes) out.per_class[label] = acc.first / acc.second;
  return out;
}

}  // namespace alphaforge
