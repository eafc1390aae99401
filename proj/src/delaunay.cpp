#include "alphaforge/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "alphaforge/error.hpp"
#include "predicates.hpp"

namespace alphaforge {

namespace {

constexpr std::uint32_t kInfinite = std::numeric_limits<std::uint32_t>::max();
constexpr std::int32_t kNone = -1;

struct Cell {
  std::array<std::uint32_t, 4> v{};
  std::array<std::int32_t, 4> n{kNone, kNone, kNone, kNone};
  bool alive = true;

  int infinite_slot() const {
    for (int k = 0; k < 4; ++k) {
      if (v[k] == kInfinite) return k;
    }
    return -1;
  }
  int slot_of_neighbor(std::int32_t c) const {
    for (int k = 0; k < 4; ++k) {
      if (n[k] == c) return k;
    }
    return -1;
  }
};

Sphere circumsphere_unchecked(const Point3& p0, const Point3& p1, const Point3& p2,
                              const Point3& p3, double& det, double& scale) {
  const Vec3 a = p1 - p0, b = p2 - p0, c = p3 - p0;
  const Vec3 bc = cross(b, c), ca = cross(c, a), ab = cross(a, b);
  det = dot(a, bc);
  scale = std::max({norm(a), norm(b), norm(c)});
  const Vec3 offset = (squared_norm(a) * bc + squared_norm(b) * ca + squared_norm(c) * ab) / (2.0 * det);
  return {p0 + offset, norm(offset)};
}

std::uint64_t pair_key(std::uint32_t u, std::uint32_t w) {
  if (u > w) std::swap(u, w);
  return (static_cast<std::uint64_t>(u) << 32) | w;
}

class Triangulation {
 public:
  explicit Triangulation(std::span<const Point3> pts) : pts_(pts) {}

  void build() {
    const auto seed = initial_simplex();
    std::vector<bool> used(pts_.size(), false);
    for (auto i : seed) used[i] = true;
    for (std::uint32_t i = 0; i < pts_.size(); ++i) {
      if (!used[i]) insert(i);
    }
  }

  std::vector<std::array<std::uint32_t, 4>> finite_cells() const {
    std::vector<std::array<std::uint32_t, 4>> out;
    for (const auto& c : cells_) {
      if (c.alive && c.infinite_slot() < 0) out.push_back(c.v);
    }
    return out;
  }

 private:
  std::span<const Point3> pts_;
  std::vector<Cell> cells_;
  std::vector<std::int32_t> free_;
  std::int32_t hint_ = 0;
  std::uint32_t walk_counter_ = 0;

  // Scratch state for cavity search; tags are compared against the epoch.
  std::vector<std::uint32_t> tag_;
  std::vector<std::uint8_t> state_;
  std::uint32_t epoch_ = 0;

  const Point3& p(std::uint32_t i) const { return pts_[i]; }

  std::array<std::uint32_t, 4> initial_simplex() {
    const auto n = static_cast<std::uint32_t>(pts_.size());
    std::uint32_t i1 = 1;
    while (i1 < n && pts_[i1] == pts_[0]) ++i1;
    std::uint32_t i2 = i1 + 1;
    while (i2 < n && predicates::collinear(pts_[0], pts_[i1], pts_[i2])) ++i2;
    std::uint32_t i3 = i2 + 1;
    while (i3 < n && predicates::orient3d(pts_[0], pts_[i1], pts_[i2], pts_[i3]) == 0) ++i3;
    if (i1 >= n || i2 >= n || i3 >= n) {
      throw Error(Errc::DegenerateInput, "all points are coplanar");
    }
    std::array<std::uint32_t, 4> v{0, i1, i2, i3};
    if (predicates::orient3d(p(v[0]), p(v[1]), p(v[2]), p(v[3])) < 0) std::swap(v[0], v[1]);

    cells_.push_back(Cell{v});
    for (int k = 0; k < 4; ++k) {
      // Ghost cell on the far side of the face opposite v[k]; swapping two finite
      // vertices flips it so that substituting an outside point for the infinite
      // vertex yields positive orientation.
      Cell g{v};
      g.v[k] = kInfinite;
      const int a = (k + 1) % 4, b = (k + 2) % 4;
      std::swap(g.v[a], g.v[b]);
      cells_.push_back(g);
    }
    link_by_faces({0, 1, 2, 3, 4});
    return {v[0], v[1], v[2], v[3]};
  }

  void link_by_faces(const std::vector<std::int32_t>& ids) {
    std::map<std::array<std::uint32_t, 3>, std::pair<std::int32_t, int>> open;
    for (auto id : ids) {
      for (int k = 0; k < 4; ++k) {
        std::array<std::uint32_t, 3> f{};
        int m = 0;
        for (int j = 0; j < 4; ++j) {
          if (j != k) f[m++] = cells_[id].v[j];
        }
        std::sort(f.begin(), f.end());
        auto it = open.find(f);
        if (it == open.end()) {
          open.emplace(f, std::make_pair(id, k));
        } else {
          cells_[id].n[k] = it->second.first;
          cells_[it->second.first].n[it->second.second] = id;
          open.erase(it);
        }
      }
    }
  }

  int orient_with(const Cell& c, int slot, std::uint32_t q) const {
    std::array<const Point3*, 4> a{};
    for (int k = 0; k < 4; ++k) a[k] = k == slot ? &p(q) : &p(c.v[k]);
    return predicates::orient3d(*a[0], *a[1], *a[2], *a[3]);
  }

  bool in_conflict(std::int32_t id, std::uint32_t q) const {
    const Cell& c = cells_[id];
    const int inf = c.infinite_slot();
    if (inf < 0) {
      return predicates::insphere(p(c.v[0]), p(c.v[1]), p(c.v[2]), p(c.v[3]), p(q)) > 0;
    }
    const int o = orient_with(c, inf, q);
    if (o != 0) return o > 0;
    // Coplanar with the hull face: conflict iff strictly inside the face's
    // circumcircle, which equals being inside the adjacent finite cell's ball.
    const Cell& f = cells_[c.n[inf]];
    return predicates::insphere(p(f.v[0]), p(f.v[1]), p(f.v[2]), p(f.v[3]), p(q)) > 0;
  }

  std::int32_t new_cell(const Cell& c) {
    if (!free_.empty()) {
      const auto id = free_.back();
      free_.pop_back();
      cells_[id] = c;
      return id;
    }
    cells_.push_back(c);
    return static_cast<std::int32_t>(cells_.size() - 1);
  }

  // Returns a cell in conflict with q, or kNone if q duplicates a vertex.
  std::int32_t locate(std::uint32_t q) {
    std::int32_t cur = hint_;
    if (!cells_[cur].alive || cells_[cur].infinite_slot() >= 0) {
      cur = kNone;
      for (std::int32_t i = 0; i < static_cast<std::int32_t>(cells_.size()); ++i) {
        if (cells_[i].alive && cells_[i].infinite_slot() < 0) {
          cur = i;
          break;
        }
      }
    }
    const std::size_t limit = 4 * cells_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
      const Cell& c = cells_[cur];
      const int start = static_cast<int>(walk_counter_++ % 4);
      std::int32_t next = kNone;
      for (int t = 0; t < 4; ++t) {
        const int k = (start + t) % 4;
        if (orient_with(c, k, q) < 0) {
          next = c.n[k];
          break;
        }
      }
      if (next == kNone) {
        for (int k = 0; k < 4; ++k) {
          if (p(c.v[k]) == p(q)) return kNone;
        }
        if (in_conflict(cur, q)) return cur;
        break;
      }
      if (cells_[next].infinite_slot() >= 0) return next;
      cur = next;
    }
    // Walk did not settle; scan.
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(cells_.size()); ++i) {
      if (cells_[i].alive && in_conflict(i, q)) return i;
    }
    return kNone;
  }

  void insert(std::uint32_t q) {
    const std::int32_t seed = locate(q);
    if (seed == kNone) return;

    if (tag_.size() < cells_.size()) {
      tag_.resize(cells_.size() * 2, 0);
      state_.resize(cells_.size() * 2, 0);
    }
    ++epoch_;
    auto mark = [&](std::int32_t id, std::uint8_t s) {
      tag_[id] = epoch_;
      state_[id] = s;
    };
    auto status = [&](std::int32_t id) -> std::uint8_t { return tag_[id] == epoch_ ? state_[id] : 0; };

    std::vector<std::int32_t> cavity{seed};
    std::vector<std::pair<std::int32_t, int>> boundary;
    mark(seed, 1);
    for (std::size_t head = 0; head < cavity.size(); ++head) {
      const std::int32_t id = cavity[head];
      for (int k = 0; k < 4; ++k) {
        const std::int32_t nb = cells_[id].n[k];
        std::uint8_t s = status(nb);
        if (s == 0) {
          s = in_conflict(nb, q) ? 1 : 2;
          mark(nb, s);
          if (s == 1) cavity.push_back(nb);
        }
        if (s == 2) boundary.emplace_back(id, k);
      }
    }

    // Capture the fan before the cavity cells are recycled.
    std::vector<Cell> fan;
    std::vector<int> outer_slot;
    fan.reserve(boundary.size());
    outer_slot.reserve(boundary.size());
    for (const auto& [id, k] : boundary) {
      Cell c;
      c.v = cells_[id].v;
      c.v[k] = q;
      c.n[k] = cells_[id].n[k];
      fan.push_back(c);
      outer_slot.push_back(cells_[c.n[k]].slot_of_neighbor(id));
    }
    for (auto id : cavity) {
      cells_[id].alive = false;
      free_.push_back(id);
    }
    std::vector<std::int32_t> created(fan.size());
    for (std::size_t i = 0; i < fan.size(); ++i) {
      const std::int32_t outer = fan[i].n[boundary[i].second];
      const std::int32_t nid = new_cell(fan[i]);
      created[i] = nid;
      cells_[outer].n[outer_slot[i]] = nid;
    }
    // Faces through q pair up across the new fan, keyed by their other two vertices.
    std::unordered_map<std::uint64_t, std::pair<std::int32_t, int>> open;
    open.reserve(fan.size() * 3);
    for (std::size_t i = 0; i < created.size(); ++i) {
      const std::int32_t id = created[i];
      const int qslot = boundary[i].second;
      for (int k = 0; k < 4; ++k) {
        if (k == qslot) continue;
        std::array<std::uint32_t, 2> uw{};
        int m = 0;
        for (int j = 0; j < 4; ++j) {
          if (j != k && j != qslot) uw[m++] = cells_[id].v[j];
        }
        const std::uint64_t key = pair_key(uw[0], uw[1]);
        auto it = open.find(key);
        if (it == open.end()) {
          open.emplace(key, std::make_pair(id, k));
        } else {
          cells_[id].n[k] = it->second.first;
          cells_[it->second.first].n[it->second.second] = id;
          open.erase(it);
        }
      }
    }
    for (auto id : created) {
      if (cells_[id].infinite_slot() < 0) {
        hint_ = id;
        break;
      }
    }
  }
};

}  // namespace

Sphere circumsphere(const Point3& p0, const Point3& p1, const Point3& p2, const Point3& p3) {
  double det = 0.0, scale = 0.0;
  if (!is_finite(p0) || !is_finite(p1) || !is_finite(p2) || !is_finite(p3)) {
    throw Error(Errc::DegenerateTetrahedron, "non-finite vertex");
  }
  const Vec3 a = p1 - p0, b = p2 - p0, c = p3 - p0;
  det = dot(a, cross(b, c));
  scale = std::max({norm(a), norm(b), norm(c)});
  if (!(std::abs(det) > 1e-12 * scale * scale * scale)) {
    throw Error(Errc::DegenerateTetrahedron, "points are coplanar; circumsphere undefined");
  }
  return circumsphere_unchecked(p0, p1, p2, p3, det, scale);
}

Tetrahedron make_tetrahedron(std::span<const Point3> points, std::array<std::uint32_t, 4> v) {
  double det = 0.0, scale = 0.0;
  const Sphere s =
      circumsphere_unchecked(points[v[0]], points[v[1]], points[v[2]], points[v[3]], det, scale);
  return {v, s.center, s.radius};
}

DelaunayComplex delaunay_complex(const PointCloud& cloud) {
  if (cloud.points.size() < 4) {
    throw Error(Errc::TooFewPoints, "Delaunay complex needs at least 4 points");
  }
  for (const auto& q : cloud.points) {
    if (!is_finite(q)) throw Error(Errc::DegenerateInput, "non-finite coordinate");
  }
  Triangulation tri(cloud.points);
  tri.build();

  DelaunayComplex out;
  out.points.points = cloud.points;
  for (const auto& v : tri.finite_cells()) {
    out.tetrahedra.push_back(make_tetrahedron(cloud.points, v));
  }
  return out;
}

}  // namespace alphaforge
