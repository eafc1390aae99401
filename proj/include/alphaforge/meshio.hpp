#pragma once

// OBJ, OFF and ASCII PLY meshes; XYZ and ASCII PLY point clouds. Reals are
// written in shortest round-trip form, so write -> read reproduces every
// coordinate bit for bit.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "alphaforge/geometry.hpp"

namespace alphaforge {

enum class MeshFormat { Obj, Off, Ply };
enum class PointFormat { Xyz, Ply };

MeshFormat parse_mesh_format(std::string_view name);
PointFormat parse_point_format(std::string_view name);
/// From the file extension; throws ConfigError for anything else.
MeshFormat mesh_format_for(const std::filesystem::path& path);
PointFormat point_format_for(const std::filesystem::path& path);

struct ReadOptions {
  bool triangulate_polygons = true;  // fan-split faces with more than 3 corners
  bool weld = false;                 // merge vertices closer than weld_tolerance
  double weld_tolerance = 1e-9;
};

/// Throws ParseError (with the offending line number), UnsupportedElement for
/// binary PLY or polygons when triangulation is off, IoError on unreadable files.
Mesh read_mesh(std::istream& in, MeshFormat format, const ReadOptions& opts = {});
Mesh read_mesh(const std::filesystem::path& path, MeshFormat format, const ReadOptions& opts = {});
Mesh read_mesh(const std::filesystem::path& path, const ReadOptions& opts = {});

void write_mesh(std::ostream& out, const Mesh& mesh, MeshFormat format);
void write_mesh(const std::filesystem::path& path, const Mesh& mesh, MeshFormat format);
void write_mesh(const std::filesystem::path& path, const Mesh& mesh);

/// XYZ lines hold "x y z" or "x y z nx ny nz"; normals are rescaled to unit
/// length, and a zero normal is a ParseError. Blank and '#' lines are skipped.
PointCloud read_points(std::istream& in, PointFormat format);
PointCloud read_points(const std::filesystem::path& path, PointFormat format);
PointCloud read_points(const std::filesystem::path& path);

void write_points(std::ostream& out, const PointCloud& cloud, PointFormat format);
void write_points(const std::filesystem::path& path, const PointCloud& cloud, PointFormat format);
void write_points(const std::filesystem::path& path, const PointCloud& cloud);

/// Merges vertices within `tolerance` of an earlier vertex, drops faces that
/// collapse or repeat an earlier face, keeps first occurrences in order.
Mesh weld_vertices(const Mesh& mesh, double tolerance);

/// Shortest decimal form that parses back to the same double.
std::string format_real(double x);

}  // namespace alphaforge
