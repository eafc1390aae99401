#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace alphaforge {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

using Point3 = Vec3;

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr double squared_norm(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(squared_norm(a)); }
constexpr double squared_distance(const Vec3& a, const Vec3& b) { return squared_norm(a - b); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/// Ordered point list with optional per-point unit normals. An empty `normals`
/// vector means the cloud carries no normals.
struct PointCloud {
  std::vector<Point3> points;
  std::vector<Vec3> normals;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  bool has_normals() const noexcept { return !normals.empty(); }
};

/// Throws Error(InvalidMesh) on non-finite coordinates or on a normal count /
/// normal length violation.
void validate(const PointCloud& cloud);

/// Indexed triangle; counter-clockwise seen from outside.
struct Face {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::uint32_t c = 0;

  constexpr std::uint32_t operator[](int i) const { return i == 0 ? a : (i == 1 ? b : c); }
  friend constexpr bool operator==(const Face&, const Face&) = default;
};

struct Mesh {
  std::vector<Point3> vertices;
  std::vector<Face> faces;

  bool empty() const noexcept { return vertices.empty() && faces.empty(); }
  friend bool operator==(const Mesh&, const Mesh&) = default;
};

/// Unordered vertex pair, stored with first < second.
struct Edge {
  std::uint32_t first = 0;
  std::uint32_t second = 0;

  static constexpr Edge make(std::uint32_t u, std::uint32_t v) {
    return u < v ? Edge{u, v} : Edge{v, u};
  }
  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

/// Triangle area below which a face counts as degenerate.
inline constexpr double kDegenerateArea = 1e-12;

}  // namespace alphaforge
