#include "alphaforge/refine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "alphaforge/alphashape.hpp"
#include "alphaforge/error.hpp"
#include "alphaforge/mesh.hpp"

namespace alphaforge {

namespace {

// One umbrella pass: v += factor * (mean of neighbours - v).
void umbrella_step(std::vector<Point3>& v, const std::vector<std::vector<std::uint32_t>>& nbrs, double factor) {
  std::vector<Point3> next = v;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (nbrs[i].empty()) continue;
    Vec3 mean;
    for (auto j : nbrs[i]) mean += v[j];
    mean = mean / static_cast<double>(nbrs[i].size());
    next[i] = v[i] + factor * (mean - v[i]);
  }
  v = std::move(next);
}

std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

void TaubinConfig::validate() const {
  if (!(lambda > 0.0 && lambda < 1.0)) throw Error(Errc::ConfigError, "taubin lambda must lie in (0, 1)");
  if (!(mu_shrink < 0.0) || !(std::abs(mu_shrink) > lambda)) {
    throw Error(Errc::ConfigError, "taubin mu must be negative with |mu| > lambda");
  }
  if (iterations < 0) throw Error(Errc::ConfigError, "taubin iterations must be >= 0");
}

Mesh taubin_smooth(const Mesh& mesh, const TaubinConfig& cfg) {
  cfg.validate();
  Mesh out = mesh;
  const auto nbrs = vertex_neighbors(mesh);
  for (int it = 0; it < cfg.iterations; ++it) {
    umbrella_step(out.vertices, nbrs, cfg.lambda);
    umbrella_step(out.vertices, nbrs, cfg.mu_shrink);
  }
  return out;
}

Mesh laplacian_smooth(const Mesh& mesh, double lambda, int iterations) {
  Mesh out = mesh;
  const auto nbrs = vertex_neighbors(mesh);
  for (int it = 0; it < iterations; ++it) umbrella_step(out.vertices, nbrs, lambda);
  return out;
}

Mesh build_baseline(const PointCloud& points, double tau, const TaubinConfig& taubin) {
  taubin.validate();
  const Mesh first = triangulate(points, tau);
  const Mesh smoothed = taubin_smooth(first, taubin);
  PointCloud cloud;
  cloud.points = smoothed.vertices;
  const ExtractedSurface second = triangulate_surface(cloud, tau);

  Mesh out;
  out.vertices = smoothed.vertices;
  out.faces.reserve(second.mesh.faces.size());
  for (const Face& f : second.mesh.faces) {
    out.faces.push_back({second.source_index[f.a], second.source_index[f.b], second.source_index[f.c]});
  }
  return out;
}

Mesh subdivide(const Mesh& mesh) {
  const auto edges = unique_edges(mesh);
  Mesh out;
  out.vertices = mesh.vertices;
  out.vertices.reserve(mesh.vertices.size() + edges.size());
  for (const Edge& e : edges) out.vertices.push_back(0.5 * (mesh.vertices[e.first] + mesh.vertices[e.second]));
  // unique_edges is in first-appearance order; a sorted copy maps edges to slots.
  std::vector<std::pair<Edge, std::uint32_t>> sorted(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    sorted[i] = {edges[i], static_cast<std::uint32_t>(mesh.vertices.size() + i)};
  }
  std::sort(sorted.begin(), sorted.end());
  auto slot = [&](std::uint32_t u, std::uint32_t v) {
    const Edge key = Edge::make(u, v);
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), key,
                                     [](const auto& a, const Edge& b) { return a.first < b; });
    return it->second;
  };
  out.faces.reserve(4 * mesh.faces.size());
  for (const Face& f : mesh.faces) {
    const auto ab = slot(f.a, f.b), bc = slot(f.b, f.c), ca = slot(f.c, f.a);
    out.faces.push_back({f.a, ab, ca});
    out.faces.push_back({ab, f.b, bc});
    out.faces.push_back({ca, bc, f.c});
    out.faces.push_back({ab, bc, ca});
  }
  return out;
}

void RefineConfig::validate() const {
  if (stages < 1) throw Error(Errc::ConfigError, "stages must be >= 1");
  if (iters_per_stage < 0) throw Error(Errc::ConfigError, "iters_per_stage must be >= 0");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) throw Error(Errc::ConfigError, "step size must be positive");
  if (n_samples == 0) throw Error(Errc::ConfigError, "n_samples must be positive");
  weights.validate();
}

RefineResult refine_mesh(const Mesh& initial, const PointCloud& gt_samples, const Mesh& baseline,
                         const RefineConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  RefineResult result;
  Mesh mesh = initial;
  Mesh base = baseline;

  for (int stage = 0; stage < cfg.stages; ++stage) {
    if (stage > 0 && cfg.subdivide_between_stages) {
      base = subdivide(Mesh{base.vertices, mesh.faces});
      mesh = subdivide(mesh);
    }
    const std::vector<Point3> anchor = mesh.vertices;
    std::vector<Vec3> offset(anchor.size());
    const std::uint64_t stage_seed = seed + static_cast<std::uint64_t>(stage);

    for (int it = 0; it < cfg.iters_per_stage; ++it) {
      for (std::size_t i = 0; i < anchor.size(); ++i) {
        mesh.vertices[i] = anchor[i] + Vec3{std::tanh(offset[i].x), std::tanh(offset[i].y), std::tanh(offset[i].z)};
      }
      const LossAndGradient lg = total_loss_grad(mesh, gt_samples, base, cfg.weights, cfg.n_samples, stage_seed);
      if (!std::isfinite(lg.loss.total)) throw Error(Errc::NonFinite, "loss became non-finite");
      result.trace.push_back({stage, it, lg.loss});
      for (std::size_t i = 0; i < anchor.size(); ++i) {
        const Vec3& g = lg.gradient[i];
        if (!is_finite(g)) throw Error(Errc::NonFinite, "gradient became non-finite");
        for (int a = 0; a < 3; ++a) {
          const double t = std::tanh(offset[i][a]);
          offset[i][a] -= cfg.step_size * g[a] * (1.0 - t * t);
        }
      }
    }

    double displacement = 0.0;
    for (std::size_t i = 0; i < anchor.size(); ++i) {
      Vec3 d{std::tanh(offset[i].x), std::tanh(offset[i].y), std::tanh(offset[i].z)};
      displacement = std::max({displacement, std::abs(d.x), std::abs(d.y), std::abs(d.z)});
      mesh.vertices[i] = anchor[i] + d;
    }
    result.stage_displacement.push_back(displacement);
  }
  result.mesh = std::move(mesh);
  return result;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace) {
  out << "stage,iteration,logcmd,cmd,laplacian_reg,edge_len,normal_consistency,normal_loss,total\n";
  for (const auto& e : trace) {
    const auto& l = e.loss;
    out << e.stage << ',' << e.iteration << ',' << shortest(l.logcmd) << ',' << shortest(l.cmd) << ','
        << shortest(l.laplacian_reg) << ',' << shortest(l.edge_len) << ',' << shortest(l.normal_consistency)
        << ',' << shortest(l.normal_loss) << ',' << shortest(l.total) << '\n';
  }
}

}  // namespace alphaforge
