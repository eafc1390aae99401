#include "alphaforge/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>

#include "alphaforge/error.hpp"
#include "alphaforge/knn.hpp"
#include "alphaforge/mesh.hpp"
#include "alphaforge/sampling.hpp"

namespace alphaforge {

LossWeights LossWeights::smooth() {
  LossWeights w;
  w.lambda1 = 0.0;
  w.lambda2 = 1.0;
  w.lambda3 = 0.5;
  w.lambda4 = 0.15;
  w.lambda5 = 1e-3;
  w.lambda6 = 1e-4;
  w.nu = 1e-4;
  return w;
}

LossWeights LossWeights::pretty() {
  LossWeights w;
  w.lambda1 = 0.0;
  w.lambda2 = 1.0;
  w.lambda3 = 0.0;
  w.lambda4 = 0.2;
  w.lambda5 = 0.0;
  w.lambda6 = 0.0;
  w.nu = 1e-4;
  return w;
}

void LossWeights::validate() const {
  for (double l : {lambda1, lambda2, lambda3, lambda4, lambda5, lambda6}) {
    if (!std::isfinite(l) || l < 0.0) throw Error(Errc::ConfigError, "loss weights must be finite and >= 0");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) throw Error(Errc::ConfigError, "mu must be positive");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw Error(Errc::ConfigError, "nu must be positive");
}

LossWeights loss_preset(std::string_view name) {
  if (name == "smooth") return LossWeights::smooth();
  if (name == "pretty") return LossWeights::pretty();
  throw Error(Errc::ConfigError, "unknown loss preset '" + std::string(name) + "'");
}

namespace {

struct Matching {
  std::vector<Neighbor> p_to_q;
  std::vector<Neighbor> q_to_p;
};

void require_nonempty(const PointCloud& p, const PointCloud& q) {
  if (p.empty() || q.empty()) throw Error(Errc::EmptyCloud, "point cloud is empty");
}

Matching match(const PointCloud& p, const PointCloud& q) {
  require_nonempty(p, q);
  const KdTree tq(q.points);
  const KdTree tp(p.points);
  return {nearest_neighbors(p.points, tq), nearest_neighbors(q.points, tp)};
}

double chamfer_value(const Matching& m) {
  double sp = 0.0, sq = 0.0;
  for (const auto& n : m.p_to_q) sp += n.squared_distance;
  for (const auto& n : m.q_to_p) sq += n.squared_distance;
  return sp / static_cast<double>(m.p_to_q.size()) + sq / static_cast<double>(m.q_to_p.size());
}

void chamfer_accumulate(const PointCloud& p, const PointCloud& q, const Matching& m, double scale,
                        std::vector<Vec3>& g) {
  const double wp = 2.0 * scale / static_cast<double>(p.size());
  const double wq = 2.0 * scale / static_cast<double>(q.size());
  for (std::size_t i = 0; i < p.size(); ++i) g[i] += wp * (p.points[i] - q.points[m.p_to_q[i].index]);
  for (std::size_t j = 0; j < q.size(); ++j) {
    const auto i = m.q_to_p[j].index;
    g[i] += wq * (p.points[i] - q.points[j]);
  }
}

double log_chamfer_value(const Matching& m, double mu) {
  double s = 0.0;
  for (const auto& n : m.p_to_q) s += std::log10(n.squared_distance + mu);
  for (const auto& n : m.q_to_p) s += std::log10(n.squared_distance + mu);
  return s;
}

void log_chamfer_accumulate(const PointCloud& p, const PointCloud& q, const Matching& m, double mu,
                            double scale, std::vector<Vec3>& g) {
  const double c = 2.0 * scale / std::numbers::ln10;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& n = m.p_to_q[i];
    g[i] += (c / (n.squared_distance + mu)) * (p.points[i] - q.points[n.index]);
  }
  for (std::size_t j = 0; j < q.size(); ++j) {
    const auto& n = m.q_to_p[j];
    g[n.index] += (c / (n.squared_distance + mu)) * (p.points[n.index] - q.points[j]);
  }
}

void require_normals(const PointCloud& p, const PointCloud& q) {
  if (!p.has_normals() || !q.has_normals()) throw Error(Errc::MissingNormals, "normals required");
}

double normal_loss_value(const PointCloud& p, const PointCloud& q, const Matching& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    s += 1.0 - std::abs(dot(p.normals[i], q.normals[m.p_to_q[i].index]));
  }
  for (std::size_t j = 0; j < q.size(); ++j) {
    s += 1.0 - std::abs(dot(p.normals[m.q_to_p[j].index], q.normals[j]));
  }
  return s / static_cast<double>(p.size() + q.size());
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// d NL / d n_p for each p (holding matches fixed).
void normal_loss_accumulate(const PointCloud& p, const PointCloud& q, const Matching& m, double scale,
                            std::vector<Vec3>& gn) {
  const double w = scale / static_cast<double>(p.size() + q.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec3& nq = q.normals[m.p_to_q[i].index];
    gn[i] -= (w * sign(dot(p.normals[i], nq))) * nq;
  }
  for (std::size_t j = 0; j < q.size(); ++j) {
    const auto i = m.q_to_p[j].index;
    gn[i] -= (w * sign(dot(p.normals[i], q.normals[j]))) * q.normals[j];
  }
}

// Pushes an upstream gradient on a face's unit normal back to its vertices.
void backprop_face_normal(const Mesh& mesh, const Face& f, const Vec3& g_normal, std::vector<Vec3>& g) {
  const Point3& a = mesh.vertices[f.a];
  const Vec3 e1 = mesh.vertices[f.b] - a, e2 = mesh.vertices[f.c] - a;
  const Vec3 c = cross(e1, e2);
  const double len = norm(c);
  if (0.5 * len < kDegenerateArea) return;
  const Vec3 n = c / len;
  const Vec3 gc = (g_normal - dot(n, g_normal) * n) / len;
  const Vec3 gb = cross(e2, gc);
  const Vec3 gcv = cross(gc, e1);
  g[f.b] += gb;
  g[f.c] += gcv;
  g[f.a] -= gb + gcv;
}

struct Laplacian {
  std::vector<Edge> edges;
  std::vector<double> raw;  // unclamped weight sums
  std::vector<double> weight;
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  std::vector<Vec3> coords;
  std::vector<bool> has_face;
};

std::uint64_t key_of(const Edge& e) { return (static_cast<std::uint64_t>(e.first) << 32) | e.second; }

double cot_at(const Vec3& u, const Vec3& w) {
  const double s = norm(cross(u, w));
  const double d = dot(u, w);
  if (s == 0.0) return d >= 0.0 ? 4.0 * kCotangentClamp : -4.0 * kCotangentClamp;
  return d / s;
}

Laplacian build_laplacian(const Mesh& mesh) {
  Laplacian lap;
  lap.has_face.assign(mesh.vertices.size(), false);
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t i = f[(k + 1) % 3], j = f[(k + 2) % 3], o = f[k];
      lap.has_face[o] = true;
      const Edge e = Edge::make(i, j);
      auto [it, inserted] = lap.index.emplace(key_of(e), static_cast<std::uint32_t>(lap.edges.size()));
      if (inserted) {
        lap.edges.push_back(e);
        lap.raw.push_back(0.0);
      }
      lap.raw[it->second] += 0.5 * cot_at(mesh.vertices[i] - mesh.vertices[o], mesh.vertices[j] - mesh.vertices[o]);
    }
  }
  lap.weight.resize(lap.raw.size());
  for (std::size_t e = 0; e < lap.raw.size(); ++e) {
    lap.weight[e] = std::clamp(lap.raw[e], -kCotangentClamp, kCotangentClamp);
  }
  lap.coords.assign(mesh.vertices.size(), Vec3{});
  for (std::size_t e = 0; e < lap.edges.size(); ++e) {
    const auto [i, j] = lap.edges[e];
    const Vec3 d = lap.weight[e] * (mesh.vertices[i] - mesh.vertices[j]);
    lap.coords[i] += d;
    lap.coords[j] -= d;
  }
  return lap;
}

// Gradient of cot(angle between u and w) with respect to u and w.
void cot_grad(const Vec3& u, const Vec3& w, Vec3& du, Vec3& dw) {
  const Vec3 c = cross(u, w);
  const double s = norm(c);
  if (s == 0.0) {
    du = dw = Vec3{};
    return;
  }
  const double d = dot(u, w);
  const double s3 = s * s * s;
  du = w / s - (d / s3) * cross(w, c);
  dw = u / s - (d / s3) * cross(c, u);
}

LossAndGradient evaluate(const Mesh& mesh, const PointCloud& target, const Mesh& baseline,
                         const LossWeights& w, std::size_t n_samples, std::uint64_t seed, bool want_grad) {
  w.validate();
  LossAndGradient out;
  LossBreakdown& b = out.loss;
  if (want_grad) out.gradient.assign(mesh.vertices.size(), Vec3{});

  const bool needs_samples = w.lambda1 > 0.0 || w.lambda2 > 0.0 || w.lambda6 > 0.0;
  if (needs_samples) {
    if (n_samples == 0) throw Error(Errc::EmptyCloud, "n_samples must be >= 1");
    if (w.lambda6 > 0.0 && !target.has_normals()) {
      throw Error(Errc::MissingNormals, "target cloud needs normals for the normal loss");
    }
    const SurfaceSamples s = sample_surface_detailed(mesh, n_samples, seed);
    const PointCloud& p = s.cloud;
    const Matching m = match(p, target);
    std::vector<Vec3> gp, gn;
    if (want_grad) {
      gp.assign(p.size(), Vec3{});
      gn.assign(p.size(), Vec3{});
    }
    if (w.lambda1 > 0.0) {
      b.logcmd = log_chamfer_value(m, w.mu);
      if (want_grad) log_chamfer_accumulate(p, target, m, w.mu, w.lambda1, gp);
    }
    if (w.lambda2 > 0.0) {
      b.cmd = chamfer_value(m);
      if (want_grad) chamfer_accumulate(p, target, m, w.lambda2, gp);
    }
    if (w.lambda6 > 0.0) {
      b.normal_loss = normal_loss_value(p, target, m);
      if (want_grad) normal_loss_accumulate(p, target, m, w.lambda6, gn);
    }
    if (want_grad) {
      std::vector<Vec3> face_gn(mesh.faces.size());
      std::vector<bool> touched(mesh.faces.size(), false);
      for (std::size_t i = 0; i < p.size(); ++i) {
        const Face& f = mesh.faces[s.face[i]];
        const auto& bc = s.bary[i];
        out.gradient[f.a] += bc[0] * gp[i];
        out.gradient[f.b] += bc[1] * gp[i];
        out.gradient[f.c] += bc[2] * gp[i];
        if (w.lambda6 > 0.0) {
          face_gn[s.face[i]] += gn[i];
          touched[s.face[i]] = true;
        }
      }
      for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        if (touched[fi]) backprop_face_normal(mesh, mesh.faces[fi], face_gn[fi], out.gradient);
      }
    }
  }
  if (w.lambda3 > 0.0) {
    b.laplacian_reg = laplacian_reg(mesh, baseline);
    if (want_grad) {
      const auto g = laplacian_reg_grad(mesh, baseline);
      for (std::size_t i = 0; i < g.size(); ++i) out.gradient[i] += w.lambda3 * g[i];
    }
  }
  if (w.lambda4 > 0.0) {
    b.edge_len = edge_length_reg(mesh);
    if (want_grad) {
      const auto g = edge_length_reg_grad(mesh);
      for (std::size_t i = 0; i < g.size(); ++i) out.gradient[i] += w.lambda4 * g[i];
    }
  }
  if (w.lambda5 > 0.0) {
    b.normal_consistency = normal_consistency(mesh);
    if (want_grad) {
      const auto g = normal_consistency_grad(mesh);
      for (std::size_t i = 0; i < g.size(); ++i) out.gradient[i] += w.lambda5 * g[i];
    }
  }
  b.total = w.lambda1 * b.logcmd + w.lambda2 * b.cmd + w.lambda3 * b.laplacian_reg +
            w.lambda4 * b.edge_len + w.lambda5 * b.normal_consistency + w.lambda6 * b.normal_loss;
  return out;
}

}  // namespace

double chamfer(const PointCloud& p, const PointCloud& q) { return chamfer_value(match(p, q)); }

std::vector<Vec3> chamfer_grad(const PointCloud& p, const PointCloud& q) {
  const Matching m = match(p, q);
  std::vector<Vec3> g(p.size());
  chamfer_accumulate(p, q, m, 1.0, g);
  return g;
}

double log_chamfer(const PointCloud& p, const PointCloud& q, double mu) {
  if (!(mu > 0.0)) throw Error(Errc::ConfigError, "mu must be positive");
  return log_chamfer_value(match(p, q), mu);
}

std::vector<Vec3> log_chamfer_grad(const PointCloud& p, const PointCloud& q, double mu) {
  if (!(mu > 0.0)) throw Error(Errc::ConfigError, "mu must be positive");
  const Matching m = match(p, q);
  std::vector<Vec3> g(p.size());
  log_chamfer_accumulate(p, q, m, mu, 1.0, g);
  return g;
}

double normal_loss(const PointCloud& p, const PointCloud& q) {
  require_nonempty(p, q);
  require_normals(p, q);
  return normal_loss_value(p, q, match(p, q));
}

std::vector<Vec3> laplacian_coords(const Mesh& mesh) {
  Laplacian lap = build_laplacian(mesh);
  for (std::size_t i = 0; i < lap.has_face.size(); ++i) {
    if (!lap.has_face[i]) {
      throw Error(Errc::IsolatedVertex, "vertex " + std::to_string(i) + " has no incident face");
    }
  }
  return std::move(lap.coords);
}

double laplacian_reg(const Mesh& mesh, const Mesh& baseline) {
  if (mesh.vertices.size() != baseline.vertices.size()) {
    throw Error(Errc::VertexCountMismatch, "mesh and baseline vertex counts differ");
  }
  if (mesh.vertices.empty()) return 0.0;
  const auto lm = build_laplacian(mesh).coords;
  const auto lt = build_laplacian(baseline).coords;
  double s = 0.0;
  for (std::size_t i = 0; i < lm.size(); ++i) s += squared_distance(lm[i], lt[i]);
  return s / static_cast<double>(lm.size());
}

std::vector<Vec3> laplacian_reg_grad(const Mesh& mesh, const Mesh& baseline) {
  if (mesh.vertices.size() != baseline.vertices.size()) {
    throw Error(Errc::VertexCountMismatch, "mesh and baseline vertex counts differ");
  }
  std::vector<Vec3> g(mesh.vertices.size());
  if (mesh.vertices.empty()) return g;
  const Laplacian lm = build_laplacian(mesh);
  const auto lt = build_laplacian(baseline).coords;
  const double scale = 2.0 / static_cast<double>(mesh.vertices.size());
  std::vector<Vec3> r(lm.coords.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = lm.coords[i] - lt[i];

  // Fixed-weight part.
  std::vector<double> edge_upstream(lm.edges.size(), 0.0);
  for (std::size_t e = 0; e < lm.edges.size(); ++e) {
    const auto [i, j] = lm.edges[e];
    const Vec3 dr = r[i] - r[j];
    g[i] += (scale * lm.weight[e]) * dr;
    g[j] -= (scale * lm.weight[e]) * dr;
    if (std::abs(lm.raw[e]) <= kCotangentClamp) {
      edge_upstream[e] = scale * dot(dr, mesh.vertices[i] - mesh.vertices[j]);
    }
  }
  // Weight part: each face corner contributes cot/2 to the opposite edge.
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t i = f[(k + 1) % 3], j = f[(k + 2) % 3], o = f[k];
      const double up = edge_upstream[lm.index.at(key_of(Edge::make(i, j)))];
      if (up == 0.0) continue;
      Vec3 du, dw;
      cot_grad(mesh.vertices[i] - mesh.vertices[o], mesh.vertices[j] - mesh.vertices[o], du, dw);
      const double c = 0.5 * up;
      g[i] += c * du;
      g[j] += c * dw;
      g[o] -= c * (du + dw);
    }
  }
  return g;
}

namespace {

template <class Visit>
void for_each_adjacent_pair(const Mesh& mesh, const std::vector<bool>& valid, Visit visit) {
  const auto inc = edge_face_incidence(mesh);
  for (const auto& faces : inc.faces) {
    for (std::size_t x = 0; x < faces.size(); ++x) {
      for (std::size_t y = x + 1; y < faces.size(); ++y) {
        if (valid[faces[x]] && valid[faces[y]]) visit(faces[x], faces[y]);
      }
    }
  }
}

void unit_normals(const Mesh& mesh, std::vector<Vec3>& normals, std::vector<bool>& valid) {
  normals.resize(mesh.faces.size());
  valid.resize(mesh.faces.size());
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    const Vec3 c = face_cross(mesh, mesh.faces[i]);
    const double len = norm(c);
    valid[i] = 0.5 * len >= kDegenerateArea;
    normals[i] = valid[i] ? c / len : Vec3{};
  }
}

}  // namespace

double normal_consistency(const Mesh& mesh) {
  std::vector<Vec3> n;
  std::vector<bool> valid;
  unit_normals(mesh, n, valid);
  double s = 0.0;
  for_each_adjacent_pair(mesh, valid, [&](std::uint32_t a, std::uint32_t b) { s += 1.0 - dot(n[a], n[b]); });
  return s;
}

std::vector<Vec3> normal_consistency_grad(const Mesh& mesh) {
  std::vector<Vec3> n;
  std::vector<bool> valid;
  unit_normals(mesh, n, valid);
  std::vector<Vec3> upstream(mesh.faces.size());
  for_each_adjacent_pair(mesh, valid, [&](std::uint32_t a, std::uint32_t b) {
    upstream[a] -= n[b];
    upstream[b] -= n[a];
  });
  std::vector<Vec3> g(mesh.vertices.size());
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    if (valid[fi]) backprop_face_normal(mesh, mesh.faces[fi], upstream[fi], g);
  }
  return g;
}

double edge_length_reg(const Mesh& mesh) {
  const auto edges = unique_edges(mesh);
  if (edges.empty()) throw Error(Errc::NoEdges, "mesh has no edges");
  double s = 0.0;
  for (const auto& e : edges) s += squared_distance(mesh.vertices[e.first], mesh.vertices[e.second]);
  return s / static_cast<double>(edges.size());
}

std::vector<Vec3> edge_length_reg_grad(const Mesh& mesh) {
  const auto edges = unique_edges(mesh);
  if (edges.empty()) throw Error(Errc::NoEdges, "mesh has no edges");
  std::vector<Vec3> g(mesh.vertices.size());
  const double c = 2.0 / static_cast<double>(edges.size());
  for (const auto& e : edges) {
    const Vec3 d = c * (mesh.vertices[e.first] - mesh.vertices[e.second]);
    g[e.first] += d;
    g[e.second] -= d;
  }
  return g;
}

LossBreakdown total_loss(const Mesh& mesh, const PointCloud& target, const Mesh& baseline,
                         const LossWeights& w, std::size_t n_samples, std::uint64_t seed) {
  return evaluate(mesh, target, baseline, w, n_samples, seed, false).loss;
}

LossAndGradient total_loss_grad(const Mesh& mesh, const PointCloud& target, const Mesh& baseline,
                                const LossWeights& w, std::size_t n_samples, std::uint64_t seed) {
  return evaluate(mesh, target, baseline, w, n_samples, seed, true);
}

}  // namespace alphaforge
