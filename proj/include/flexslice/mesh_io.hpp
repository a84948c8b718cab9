#pragma once

#include "flexslice/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace flexslice {

// Print orientation. In upside_down mode the part hangs beneath the bed, so
// thin vertical features are loaded in tension.
enum class Orientation
{
    standard,
    upside_down,
};

std::string_view to_string(Orientation mode);
// Accepts "standard", "upside-down" and "upside_down". Throws ConfigError.
Orientation parse_orientation(std::string_view text);

using Triangle = std::array<Vec3, 3>;

// Triangles below this area (mm^2) are dropped during construction.
inline constexpr double kDegenerateArea = 1e-9;

class TriangleMesh
{
public:
    std::vector<Vec3>                         vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::string                               source_name;

    TriangleMesh() = default;

    // Builds an indexed mesh from a triangle soup. Vertices are shared when
    // their coordinates are bit-identical; degenerate triangles are dropped.
    static TriangleMesh from_triangles(std::span<const Triangle> soup, std::string name = {});

    bool        empty() const { return triangles.empty(); }
    std::size_t size() const { return triangles.size(); }

    Triangle triangle(std::size_t i) const
    {
        const auto& t = triangles[i];
        return { vertices[t[0]], vertices[t[1]], vertices[t[2]] };
    }
    // Unit normal from winding order (counter-clockwise seen from outside).
    Vec3 normal(std::size_t i) const;

    BoundingBox3 bounding_box() const;
};

double triangle_area(const Triangle& t);

struct MeshStats
{
    Vec3        aabb_min;
    Vec3        aabb_max;
    double      signed_volume = 0.;
    bool        watertight    = false;
    std::size_t triangle_count = 0;
};

// Throws GeometryError on an empty mesh.
MeshStats analyze_mesh(const TriangleMesh& mesh);

// Proper rigid transform from model coordinates to print coordinates.
struct Transform
{
    std::array<std::array<double, 3>, 3> rotation { { { 1., 0., 0. }, { 0., 1., 0. }, { 0., 0., 1. } } };
    Vec3                                 translation;
    Orientation                          mode = Orientation::standard;

    Vec3   apply(const Vec3& p) const;
    double determinant() const;
    bool   is_identity() const;
};

TriangleMesh transformed(const TriangleMesh& mesh, const Transform& xf);

// upside_down rotates 180 degrees about X, then both modes translate the
// bounding box minimum to the origin.
std::pair<TriangleMesh, Transform> orient_for_print(const TriangleMesh& mesh, Orientation mode);

// STL input. The buffer is ASCII iff it begins with "solid" and the token
// "facet" occurs within its first 1024 bytes. Throws ParseError.
TriangleMesh parse_stl(std::string_view bytes, std::string name = {});
TriangleMesh load_stl(const std::filesystem::path& path);

// Binary STL with recomputed facet normals.
std::string write_stl_binary(const TriangleMesh& mesh);
void        save_stl(const TriangleMesh& mesh, const std::filesystem::path& path);

} // namespace flexslice
