#include "flexslice/mesh_io.hpp"

#include "flexslice/errors.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <unordered_map>

namespace flexslice {

std::string_view to_string(Orientation mode)
{
    return mode == Orientation::upside_down ? "upside-down" : "standard";
}

Orientation parse_orientation(std::string_view text)
{
    if (text == "standard")
        return Orientation::standard;
    if (text == "upside-down" || text == "upside_down")
        return Orientation::upside_down;
    throw ConfigError("unknown orientation mode '" + std::string(text) + "' (expected standard|upside-down)");
}

double triangle_area(const Triangle& t)
{
    return 0.5 * norm(cross(t[1] - t[0], t[2] - t[0]));
}

namespace {

struct VertexKeyHash
{
    std::size_t operator()(const std::array<std::uint64_t, 3>& k) const noexcept
    {
        std::size_t h = 1469598103934665603ull;
        for (std::uint64_t v : k)
            h = (h ^ v) * 1099511628211ull;
        return h;
    }
};

std::array<std::uint64_t, 3> vertex_key(const Vec3& p)
{
    // +0.0 and -0.0 must share a vertex.
    auto bits = [](double v) { return std::bit_cast<std::uint64_t>(v == 0. ? 0. : v); };
    return { bits(p.x), bits(p.y), bits(p.z) };
}

bool finite(const Vec3& p) { return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z); }

} // namespace

TriangleMesh TriangleMesh::from_triangles(std::span<const Triangle> soup, std::string name)
{
    TriangleMesh mesh;
    mesh.source_name = std::move(name);
    std::unordered_map<std::array<std::uint64_t, 3>, std::uint32_t, VertexKeyHash> index;
    index.reserve(soup.size() * 2);

    for (const Triangle& t : soup) {
        for (const Vec3& p : t)
            if (!finite(p))
                throw ParseError("non-finite vertex coordinate");
        if (triangle_area(t) < kDegenerateArea)
            continue;
        std::array<std::uint32_t, 3> idx {};
        for (int k = 0; k < 3; ++k) {
            auto [it, inserted] = index.try_emplace(vertex_key(t[k]), static_cast<std::uint32_t>(mesh.vertices.size()));
            if (inserted)
                mesh.vertices.push_back(t[k]);
            idx[k] = it->second;
        }
        if (idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2])
            continue;
        mesh.triangles.push_back(idx);
    }
    return mesh;
}

Vec3 TriangleMesh::normal(std::size_t i) const
{
    const Triangle t = triangle(i);
    const Vec3     n = cross(t[1] - t[0], t[2] - t[0]);
    const double   l = norm(n);
    return l > 0. ? n * (1. / l) : Vec3 {};
}

BoundingBox3 TriangleMesh::bounding_box() const
{
    BoundingBox3 bb;
    for (const auto& tri : triangles)
        for (std::uint32_t v : tri)
            bb.merge(vertices[v]);
    return bb;
}

MeshStats analyze_mesh(const TriangleMesh& mesh)
{
    if (mesh.empty())
        throw GeometryError("analyze_mesh: empty mesh");

    MeshStats          stats;
    const BoundingBox3 bb = mesh.bounding_box();
    stats.aabb_min        = bb.min;
    stats.aabb_max        = bb.max;
    stats.triangle_count  = mesh.size();

    // Signed tetrahedra against the origin, accumulated with Kahan summation.
    double sum = 0., comp = 0.;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const Triangle t = mesh.triangle(i);
        const double   v = dot(t[0], cross(t[1], t[2])) / 6.;
        const double   y = v - comp;
        const double   s = sum + y;
        comp             = (s - sum) - y;
        sum              = s;
    }
    stats.signed_volume = sum;

    std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            std::uint32_t a = tri[k], b = tri[(k + 1) % 3];
            if (a > b)
                std::swap(a, b);
            ++edges[{ a, b }];
        }
    stats.watertight = std::all_of(edges.begin(), edges.end(), [](const auto& e) { return e.second == 2; });
    return stats;
}

Vec3 Transform::apply(const Vec3& p) const
{
    const auto& r = rotation;
    return { r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z + translation.x,
             r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z + translation.y,
             r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z + translation.z };
}

double Transform::determinant() const
{
    const auto& r = rotation;
    return r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
           r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
}

bool Transform::is_identity() const
{
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (rotation[i][j] != (i == j ? 1. : 0.))
                return false;
    return translation.x == 0. && translation.y == 0. && translation.z == 0.;
}

TriangleMesh transformed(const TriangleMesh& mesh, const Transform& xf)
{
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices)
        v = xf.apply(v);
    return out;
}

std::pair<TriangleMesh, Transform> orient_for_print(const TriangleMesh& mesh, Orientation mode)
{
    if (mesh.empty())
        throw GeometryError("orient_for_print: empty mesh");

    Transform xf;
    xf.mode = mode;
    if (mode == Orientation::upside_down)
        xf.rotation = { { { 1., 0., 0. }, { 0., -1., 0. }, { 0., 0., -1. } } };

    BoundingBox3 bb;
    for (const Vec3& v : mesh.vertices)
        bb.merge(xf.apply(v));
    xf.translation = Vec3 {} - bb.min;
    // Avoid -0.0 in the translation so an already placed mesh yields an exact identity.
    for (double* c : { &xf.translation.x, &xf.translation.y, &xf.translation.z })
        if (*c == 0.)
            *c = 0.;

    TriangleMesh out = transformed(mesh, xf);
    // Snap the new minimum exactly onto the origin.
    BoundingBox3 after = out.bounding_box();
    for (Vec3& v : out.vertices) {
        if (v.x == after.min.x) v.x = 0.;
        if (v.y == after.min.y) v.y = 0.;
        if (v.z == after.min.z) v.z = 0.;
    }
    return { std::move(out), xf };
}

// ---------------------------------------------------------------------------
// STL reading

namespace {

bool iequals(std::string_view a, std::string_view b)
{
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

bool looks_ascii(std::string_view bytes)
{
    std::size_t p = 0;
    while (p < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[p])))
        ++p;
    if (bytes.size() - p < 5 || !iequals(bytes.substr(p, 5), "solid"))
        return false;
    const std::string_view head = bytes.substr(0, std::min<std::size_t>(1024, bytes.size()));
    for (std::size_t i = 0; i + 5 <= head.size(); ++i)
        if (iequals(head.substr(i, 5), "facet"))
            return true;
    return false;
}

float read_f32(const char* p)
{
    std::uint32_t u;
    std::memcpy(&u, p, 4);
    if constexpr (std::endian::native == std::endian::big)
        u = __builtin_bswap32(u);
    return std::bit_cast<float>(u);
}

std::uint32_t read_u32(const char* p)
{
    std::uint32_t u;
    std::memcpy(&u, p, 4);
    if constexpr (std::endian::native == std::endian::big)
        u = __builtin_bswap32(u);
    return u;
}

TriangleMesh parse_binary(std::string_view bytes, std::string name)
{
    if (bytes.size() < 84)
        throw ParseError("binary STL truncated: header shorter than 84 bytes");
    const std::uint64_t count    = read_u32(bytes.data() + 80);
    const std::uint64_t expected = 84 + 50 * count;
    if (bytes.size() < expected)
        throw ParseError("binary STL truncated: declares " + std::to_string(count) + " facets, body holds " +
                         std::to_string((bytes.size() - 84) / 50));
    if (bytes.size() > expected)
        throw ParseError("binary STL count mismatch: " + std::to_string(bytes.size() - expected) +
                         " trailing bytes after " + std::to_string(count) + " facets");

    std::vector<Triangle> soup;
    soup.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        // Skip the 12-byte normal; it is recomputed from the winding.
        const char* rec = bytes.data() + 84 + 50 * i + 12;
        Triangle    t;
        for (int k = 0; k < 3; ++k)
            t[k] = { read_f32(rec + 12 * k), read_f32(rec + 12 * k + 4), read_f32(rec + 12 * k + 8) };
        soup.push_back(t);
    }
    return TriangleMesh::from_triangles(soup, std::move(name));
}

double parse_coordinate(std::string_view tok, std::size_t line)
{
    double v   = 0.;
    auto   res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc {} || res.ptr != tok.data() + tok.size())
        throw ParseError("ASCII STL line " + std::to_string(line) + ": bad coordinate '" + std::string(tok) + "'");
    if (!std::isfinite(v))
        throw ParseError("ASCII STL line " + std::to_string(line) + ": non-finite coordinate");
    return v;
}

TriangleMesh parse_ascii(std::string_view bytes, std::string name)
{
    // Token stream with line numbers for diagnostics.
    std::vector<std::pair<std::string_view, std::size_t>> toks;
    std::size_t                                           line = 1;
    for (std::size_t i = 0; i < bytes.size();) {
        const char c = bytes[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else {
            std::size_t j = i;
            while (j < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[j])))
                ++j;
            toks.emplace_back(bytes.substr(i, j - i), line);
            i = j;
        }
    }

    std::vector<Triangle> soup;
    bool                  in_facet = false;
    std::vector<Vec3>     corners;
    std::size_t           facet_line = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const auto [tok, ln] = toks[i];
        if (iequals(tok, "facet")) {
            if (in_facet)
                throw ParseError("ASCII STL line " + std::to_string(ln) + ": facet opened inside another facet");
            in_facet   = true;
            facet_line = ln;
            corners.clear();
        } else if (iequals(tok, "vertex")) {
            if (!in_facet)
                throw ParseError("ASCII STL line " + std::to_string(ln) + ": vertex outside facet");
            if (i + 3 >= toks.size())
                throw ParseError("ASCII STL line " + std::to_string(ln) + ": vertex with fewer than 3 coordinates");
            Vec3 p { parse_coordinate(toks[i + 1].first, ln), parse_coordinate(toks[i + 2].first, ln),
                     parse_coordinate(toks[i + 3].first, ln) };
            corners.push_back(p);
            i += 3;
        } else if (iequals(tok, "endfacet")) {
            if (!in_facet)
                throw ParseError("ASCII STL line " + std::to_string(ln) + ": endfacet without facet");
            if (corners.size() != 3)
                throw ParseError("ASCII STL line " + std::to_string(facet_line) + ": facet has " +
                                 std::to_string(corners.size()) + " vertices, expected 3");
            soup.push_back({ corners[0], corners[1], corners[2] });
            in_facet = false;
        } else if (iequals(tok, "normal")) {
            i += 3;
        }
        // solid/endsolid names, "outer", "loop", "endloop" carry no geometry.
    }
    if (in_facet)
        throw ParseError("ASCII STL: unterminated facet starting at line " + std::to_string(facet_line));
    return TriangleMesh::from_triangles(soup, std::move(name));
}

} // namespace

TriangleMesh parse_stl(std::string_view bytes, std::string name)
{
    return looks_ascii(bytes) ? parse_ascii(bytes, std::move(name)) : parse_binary(bytes, std::move(name));
}

TriangleMesh load_stl(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_stl(bytes, path.filename().string());
}

std::string write_stl_binary(const TriangleMesh& mesh)
{
    std::string out(84 + 50 * mesh.size(), '\0');
    const std::string header = "binary STL written by flexslice";
    std::memcpy(out.data(), header.data(), header.size());
    auto put_u32 = [&](std::size_t at, std::uint32_t v) {
        if constexpr (std::endian::native == std::endian::big)
            v = __builtin_bswap32(v);
        std::memcpy(out.data() + at, &v, 4);
    };
    auto put_f32 = [&](std::size_t at, double v) { put_u32(at, std::bit_cast<std::uint32_t>(static_cast<float>(v))); };

    put_u32(80, static_cast<std::uint32_t>(mesh.size()));
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const std::size_t base = 84 + 50 * i;
        const Vec3        n    = mesh.normal(i);
        put_f32(base, n.x);
        put_f32(base + 4, n.y);
        put_f32(base + 8, n.z);
        const Triangle t = mesh.triangle(i);
        for (int k = 0; k < 3; ++k) {
            put_f32(base + 12 + 12 * k, t[k].x);
            put_f32(base + 16 + 12 * k, t[k].y);
            put_f32(base + 20 + 12 * k, t[k].z);
        }
    }
    return out;
}

void save_stl(const TriangleMesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError("cannot write " + path.string());
    const std::string bytes = write_stl_binary(mesh);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace flexslice
