#include "alphaforge/meshio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <vector>

#include "alphaforge/error.hpp"

namespace alphaforge {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line split into whitespace-separated tokens; false at end of input.
  bool next(std::vector<std::string_view>& tokens) {
    if (!std::getline(in_, line_)) return false;
    ++number_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    tokens.clear();
    std::size_t i = 0;
    while (i < line_.size()) {
      while (i < line_.size() && std::isspace(static_cast<unsigned char>(line_[i]))) ++i;
      const std::size_t start = i;
      while (i < line_.size() && !std::isspace(static_cast<unsigned char>(line_[i]))) ++i;
      if (i > start) tokens.emplace_back(line_.data() + start, i - start);
    }
    return true;
  }

  // Next line with at least one token that is not a '#' comment.
  bool next_content(std::vector<std::string_view>& tokens) {
    while (next(tokens)) {
      if (!tokens.empty() && tokens[0][0] != '#') return true;
    }
    return false;
  }

  std::size_t line() const { return number_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::ParseError, "line " + std::to_string(number_) + ": " + what);
  }
  [[noreturn]] void fail_eof(const std::string& what) const {
    throw Error(Errc::ParseError, "line " + std::to_string(number_ + 1) + ": unexpected end of file, " + what);
  }

  double real(std::string_view tok) const {
    double x = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      fail("expected a number, got '" + std::string(tok) + "'");
    }
    if (!std::isfinite(x)) fail("non-finite coordinate '" + std::string(tok) + "'");
    return x;
  }

  long long integer(std::string_view tok) const {
    long long x = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      fail("expected an integer, got '" + std::string(tok) + "'");
    }
    return x;
  }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t number_ = 0;
};

void add_polygon(Mesh& mesh, const std::vector<std::uint32_t>& poly, const ReadOptions& opts,
                 const LineReader& reader) {
  if (poly.size() < 3) reader.fail("face with fewer than 3 vertices");
  if (poly.size() > 3 && !opts.triangulate_polygons) {
    throw Error(Errc::UnsupportedElement,
                "line " + std::to_string(reader.line()) + ": polygon with " + std::to_string(poly.size()) +
                    " vertices and triangulation disabled");
  }
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
}

std::uint32_t checked_index(long long i, std::size_t n, const LineReader& reader) {
  if (i < 0 || static_cast<std::size_t>(i) >= n) reader.fail("vertex index " + std::to_string(i) + " out of range");
  return static_cast<std::uint32_t>(i);
}

Mesh read_obj(std::istream& in, const ReadOptions& opts) {
  LineReader reader(in);
  std::vector<std::string_view> t;
  Mesh mesh;
  std::vector<std::pair<std::vector<long long>, std::size_t>> pending;
  while (reader.next_content(t)) {
    if (t[0] == "v") {
      if (t.size() < 4) reader.fail("vertex needs 3 coordinates");
      mesh.vertices.push_back({reader.real(t[1]), reader.real(t[2]), reader.real(t[3])});
    } else if (t[0] == "f") {
      std::vector<std::uint32_t> poly;
      for (std::size_t k = 1; k < t.size(); ++k) {
        const auto tok = t[k].substr(0, t[k].find('/'));
        long long i = reader.integer(tok);
        if (i == 0) reader.fail("OBJ indices start at 1");
        i = i > 0 ? i - 1 : static_cast<long long>(mesh.vertices.size()) + i;
        poly.push_back(checked_index(i, mesh.vertices.size(), reader));
      }
      add_polygon(mesh, poly, opts, reader);
    }
    // Other records (vn, vt, g, o, s, usemtl, mtllib, l, p) carry nothing we keep.
  }
  return mesh;
}

Mesh read_off(std::istream& in, const ReadOptions& opts) {
  LineReader reader(in);
  std::vector<std::string_view> t;
  if (!reader.next_content(t)) reader.fail_eof("missing OFF header");
  if (t[0] != "OFF") reader.fail("expected OFF header");
  std::vector<std::string_view> counts(t.begin() + 1, t.end());
  if (counts.empty()) {
    if (!reader.next_content(t)) reader.fail_eof("missing element counts");
    counts = t;
  }
  if (counts.size() < 2) reader.fail("expected vertex and face counts");
  const long long nv = reader.integer(counts[0]), nf = reader.integer(counts[1]);
  if (nv < 0 || nf < 0) reader.fail("negative element count");

  Mesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) {
    if (!reader.next_content(t)) reader.fail_eof("expected " + std::to_string(nv) + " vertices");
    if (t.size() < 3) reader.fail("vertex needs 3 coordinates");
    mesh.vertices.push_back({reader.real(t[0]), reader.real(t[1]), reader.real(t[2])});
  }
  for (long long i = 0; i < nf; ++i) {
    if (!reader.next_content(t)) reader.fail_eof("expected " + std::to_string(nf) + " faces");
    const long long k = reader.integer(t[0]);
    if (k < 0 || static_cast<std::size_t>(k) + 1 > t.size()) reader.fail("face vertex count does not match");
    std::vector<std::uint32_t> poly;
    for (long long j = 1; j <= k; ++j) poly.push_back(checked_index(reader.integer(t[j]), mesh.vertices.size(), reader));
    add_polygon(mesh, poly, opts, reader);
  }
  return mesh;
}

struct PlyProperty {
  std::string name;
  bool list = false;
};

struct PlyElement {
  std::string name;
  long long count = 0;
  std::vector<PlyProperty> props;
};

std::vector<PlyElement> read_ply_header(LineReader& reader) {
  std::vector<std::string_view> t;
  if (!reader.next(t) || t.empty() || t[0] != "ply") reader.fail("expected 'ply' magic");
  std::vector<PlyElement> elements;
  bool format_seen = false;
  while (true) {
    if (!reader.next(t)) reader.fail_eof("missing end_header");
    if (t.empty() || t[0] == "comment" || t[0] == "obj_info") continue;
    if (t[0] == "end_header") break;
    if (t[0] == "format") {
      if (t.size() < 2) reader.fail("malformed format line");
      if (t[1] != "ascii") {
        throw Error(Errc::UnsupportedElement, "line " + std::to_string(reader.line()) + ": PLY format '" +
                                                  std::string(t[1]) + "' is not supported, only ascii");
      }
      format_seen = true;
    } else if (t[0] == "element") {
      if (t.size() < 3) reader.fail("malformed element line");
      const long long n = reader.integer(t[2]);
      if (n < 0) reader.fail("negative element count");
      elements.push_back({std::string(t[1]), n, {}});
    } else if (t[0] == "property") {
      if (elements.empty()) reader.fail("property before any element");
      if (t.size() >= 5 && t[1] == "list") {
        elements.back().props.push_back({std::string(t[4]), true});
      } else if (t.size() >= 3) {
        elements.back().props.push_back({std::string(t[2]), false});
      } else {
        reader.fail("malformed property line");
      }
    } else {
      reader.fail("unknown header line '" + std::string(t[0]) + "'");
    }
  }
  if (!format_seen) reader.fail("missing format line");
  return elements;
}

// One element record: scalar values by property name plus the first list.
struct PlyRecord {
  std::map<std::string, double, std::less<>> scalars;
  std::vector<long long> list;
};

PlyRecord read_ply_record(LineReader& reader, const PlyElement& el, bool want_list) {
  std::vector<std::string_view> t;
  if (!reader.next_content(t)) reader.fail_eof("expected " + std::to_string(el.count) + " " + el.name + " records");
  PlyRecord rec;
  std::size_t pos = 0;
  bool list_taken = false;
  for (const auto& p : el.props) {
    if (pos >= t.size()) reader.fail("too few values in " + el.name + " record");
    if (p.list) {
      const long long k = reader.integer(t[pos++]);
      if (k < 0 || pos + static_cast<std::size_t>(k) > t.size()) reader.fail("list length exceeds record");
      for (long long j = 0; j < k; ++j) {
        if (want_list && !list_taken) {
          rec.list.push_back(reader.integer(t[pos]));
        }
        ++pos;
      }
      list_taken = list_taken || want_list;
    } else {
      rec.scalars[p.name] = reader.real(t[pos++]);
    }
  }
  return rec;
}

bool has_prop(const PlyElement& el, std::string_view name) {
  return std::any_of(el.props.begin(), el.props.end(), [&](const PlyProperty& p) { return !p.list && p.name == name; });
}

Vec3 unit_normal(const Vec3& n, const LineReader& reader) {
  const double len = norm(n);
  if (!(len > 1e-12)) reader.fail("zero normal cannot be normalized");
  // Already-unit normals are kept verbatim so files round-trip exactly.
  if (std::abs(len - 1.0) <= 1e-12) return n;
  return n / len;
}

void read_ply(std::istream& in, Mesh* mesh, PointCloud* cloud, const ReadOptions& opts) {
  LineReader reader(in);
  const auto elements = read_ply_header(reader);
  std::size_t nverts = 0;
  for (const auto& el : elements) {
    if (el.name == "vertex") {
      for (const char* axis : {"x", "y", "z"}) {
        if (!has_prop(el, axis)) reader.fail(std::string("vertex element lacks property ") + axis);
      }
      const bool normals = cloud && has_prop(el, "nx") && has_prop(el, "ny") && has_prop(el, "nz");
      for (long long i = 0; i < el.count; ++i) {
        const auto rec = read_ply_record(reader, el, false);
        const Point3 p{rec.scalars.find("x")->second, rec.scalars.find("y")->second, rec.scalars.find("z")->second};
        if (mesh) mesh->vertices.push_back(p);
        if (cloud) {
          cloud->points.push_back(p);
          if (normals) {
            const Vec3 n{rec.scalars.find("nx")->second, rec.scalars.find("ny")->second,
                         rec.scalars.find("nz")->second};
            cloud->normals.push_back(unit_normal(n, reader));
          }
        }
      }
      nverts = static_cast<std::size_t>(el.count);
    } else if (el.name == "face" && mesh) {
      const bool has_list = std::any_of(el.props.begin(), el.props.end(), [](const PlyProperty& p) {
        return p.list && (p.name == "vertex_indices" || p.name == "vertex_index");
      });
      if (!has_list) reader.fail("face element lacks a vertex_indices list");
      for (long long i = 0; i < el.count; ++i) {
        const auto rec = read_ply_record(reader, el, true);
        std::vector<std::uint32_t> poly;
        for (long long idx : rec.list) poly.push_back(checked_index(idx, nverts, reader));
        add_polygon(*mesh, poly, opts, reader);
      }
    } else {
      for (long long i = 0; i < el.count; ++i) read_ply_record(reader, el, false);
    }
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ostream& out, const std::string& what) {
  out.flush();
  if (!out) throw Error(Errc::IoError, "failed writing " + what);
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

void write_vec(std::ostream& out, const Vec3& v) {
  out << format_real(v.x) << ' ' << format_real(v.y) << ' ' << format_real(v.z);
}

}  // namespace

std::string format_real(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

MeshFormat parse_mesh_format(std::string_view name) {
  if (name == "obj") return MeshFormat::Obj;
  if (name == "off") return MeshFormat::Off;
  if (name == "ply") return MeshFormat::Ply;
  throw Error(Errc::ConfigError, "unknown mesh format '" + std::string(name) + "'");
}

PointFormat parse_point_format(std::string_view name) {
  if (name == "xyz") return PointFormat::Xyz;
  if (name == "ply") return PointFormat::Ply;
  throw Error(Errc::ConfigError, "unknown point format '" + std::string(name) + "'");
}

MeshFormat mesh_format_for(const std::filesystem::path& path) {
  const auto ext = lower_extension(path);
  if (ext.size() > 1) return parse_mesh_format(std::string_view(ext).substr(1));
  throw Error(Errc::ConfigError, "cannot infer mesh format of '" + path.string() + "'");
}

PointFormat point_format_for(const std::filesystem::path& path) {
  const auto ext = lower_extension(path);
  if (ext.size() > 1) return parse_point_format(std::string_view(ext).substr(1));
  throw Error(Errc::ConfigError, "cannot infer point format of '" + path.string() + "'");
}

Mesh read_mesh(std::istream& in, MeshFormat format, const ReadOptions& opts) {
  Mesh mesh;
  switch (format) {
    case MeshFormat::Obj:
      mesh = read_obj(in, opts);
      break;
    case MeshFormat::Off:
      mesh = read_off(in, opts);
      break;
    case MeshFormat::Ply:
      read_ply(in, &mesh, nullptr, opts);
      break;
  }
  if (opts.weld) mesh = weld_vertices(mesh, opts.weld_tolerance);
  return mesh;
}

Mesh read_mesh(const std::filesystem::path& path, MeshFormat format, const ReadOptions& opts) {
  auto in = open_in(path);
  return read_mesh(in, format, opts);
}

Mesh read_mesh(const std::filesystem::path& path, const ReadOptions& opts) {
  return read_mesh(path, mesh_format_for(path), opts);
}

void write_mesh(std::ostream& out, const Mesh& mesh, MeshFormat format) {
  switch (format) {
    case MeshFormat::Obj:
      for (const auto& v : mesh.vertices) {
        out << "v ";
        write_vec(out, v);
        out << '\n';
      }
      for (const auto& f : mesh.faces) out << "f " << f.a + 1 << ' ' << f.b + 1 << ' ' << f.c + 1 << '\n';
      break;
    case MeshFormat::Off:
      out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
      for (const auto& v : mesh.vertices) {
        write_vec(out, v);
        out << '\n';
      }
      for (const auto& f : mesh.faces) out << "3 " << f.a << ' ' << f.b << ' ' << f.c << '\n';
      break;
    case MeshFormat::Ply:
      out << "ply\nformat ascii 1.0\nelement vertex " << mesh.vertices.size()
          << "\nproperty double x\nproperty double y\nproperty double z\nelement face " << mesh.faces.size()
          << "\nproperty list uchar int vertex_indices\nend_header\n";
      for (const auto& v : mesh.vertices) {
        write_vec(out, v);
        out << '\n';
      }
      for (const auto& f : mesh.faces) out << "3 " << f.a << ' ' << f.b << ' ' << f.c << '\n';
      break;
  }
  finish(out, "mesh");
}

void write_mesh(const std::filesystem::path& path, const Mesh& mesh, MeshFormat format) {
  auto out = open_out(path);
  write_mesh(out, mesh, format);
}

void write_mesh(const std::filesystem::path& path, const Mesh& mesh) {
  write_mesh(path, mesh, mesh_format_for(path));
}

PointCloud read_points(std::istream& in, PointFormat format) {
  PointCloud cloud;
  if (format == PointFormat::Ply) {
    read_ply(in, nullptr, &cloud, {});
    return cloud;
  }
  LineReader reader(in);
  std::vector<std::string_view> t;
  while (reader.next_content(t)) {
    if (t.size() != 3 && t.size() != 6) reader.fail("expected 3 or 6 values, got " + std::to_string(t.size()));
    const bool normals = t.size() == 6;
    if (!cloud.empty() && normals != cloud.has_normals()) reader.fail("normals present on some lines only");
    cloud.points.push_back({reader.real(t[0]), reader.real(t[1]), reader.real(t[2])});
    if (normals) cloud.normals.push_back(unit_normal({reader.real(t[3]), reader.real(t[4]), reader.real(t[5])}, reader));
  }
  return cloud;
}

PointCloud read_points(const std::filesystem::path& path, PointFormat format) {
  auto in = open_in(path);
  return read_points(in, format);
}

PointCloud read_points(const std::filesystem::path& path) { return read_points(path, point_format_for(path)); }

void write_points(std::ostream& out, const PointCloud& cloud, PointFormat format) {
  const bool normals = cloud.has_normals();
  if (format == PointFormat::Ply) {
    out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
        << "\nproperty double x\nproperty double y\nproperty double z\n";
    if (normals) out << "property double nx\nproperty double ny\nproperty double nz\n";
    out << "end_header\n";
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    write_vec(out, cloud.points[i]);
    if (normals) {
      out << ' ';
      write_vec(out, cloud.normals[i]);
    }
    out << '\n';
  }
  finish(out, "points");
}

void write_points(const std::filesystem::path& path, const PointCloud& cloud, PointFormat format) {
  auto out = open_out(path);
  write_points(out, cloud, format);
}

void write_points(const std::filesystem::path& path, const PointCloud& cloud) {
  write_points(path, cloud, point_format_for(path));
}

Mesh weld_vertices(const Mesh& mesh, double tolerance) {
  // Bucket on a grid of cell size `tolerance`; candidates lie in the 27 cells around.
  const double cell = tolerance > 0.0 ? tolerance : 1e-300;
  auto key = [&](const Point3& p) {
    return std::array<long long, 3>{static_cast<long long>(std::floor(p.x / cell)),
                                    static_cast<long long>(std::floor(p.y / cell)),
                                    static_cast<long long>(std::floor(p.z / cell))};
  };
  std::map<std::array<long long, 3>, std::vector<std::uint32_t>> grid;
  Mesh out;
  std::vector<std::uint32_t> remap(mesh.vertices.size());
  const double tol2 = tolerance * tolerance;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Point3& p = mesh.vertices[i];
    const auto k = key(p);
    std::optional<std::uint32_t> hit;
    for (long long dx = -1; dx <= 1 && !hit; ++dx) {
      for (long long dy = -1; dy <= 1 && !hit; ++dy) {
        for (long long dz = -1; dz <= 1 && !hit; ++dz) {
          const auto it = grid.find({k[0] + dx, k[1] + dy, k[2] + dz});
          if (it == grid.end()) continue;
          for (auto j : it->second) {
            if (squared_distance(out.vertices[j], p) <= tol2) {
              hit = j;
              break;
            }
          }
        }
      }
    }
    if (!hit) {
      hit = static_cast<std::uint32_t>(out.vertices.size());
      out.vertices.push_back(p);
      grid[k].push_back(*hit);
    }
    remap[i] = *hit;
  }
  std::set<std::array<std::uint32_t, 3>> seen;
  for (const Face& f : mesh.faces) {
    const Face g{remap[f.a], remap[f.b], remap[f.c]};
    if (g.a == g.b || g.b == g.c || g.a == g.c) continue;
    std::array<std::uint32_t, 3> t{g.a, g.b, g.c};
    std::sort(t.begin(), t.end());
    if (seen.insert(t).second) out.faces.push_back(g);
  }
  return out;
}

}  // namespace alphaforge
