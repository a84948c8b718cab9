#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fixtures {

namespace {

void quad(std::vector<Triangle>& out, Vec3 a, Vec3 b, Vec3 c, Vec3 d)
{
    out.push_back({ a, b, c });
    out.push_back({ a, c, d });
}

std::vector<Triangle> box_soup(Vec3 s, Vec3 o)
{
    auto v = [&](int i, int j, int k) { return Vec3 { o.x + i * s.x, o.y + j * s.y, o.z + k * s.z }; };
    std::vector<Triangle> t;
    quad(t, v(0, 0, 0), v(0, 1, 0), v(1, 1, 0), v(1, 0, 0)); // bottom, -z
    quad(t, v(0, 0, 1), v(1, 0, 1), v(1, 1, 1), v(0, 1, 1)); // top, +z
    quad(t, v(0, 0, 0), v(1, 0, 0), v(1, 0, 1), v(0, 0, 1)); // -y
    quad(t, v(0, 1, 0), v(0, 1, 1), v(1, 1, 1), v(1, 1, 0)); // +y
    quad(t, v(0, 0, 0), v(0, 0, 1), v(0, 1, 1), v(0, 1, 0)); // -x
    quad(t, v(1, 0, 0), v(1, 1, 0), v(1, 1, 1), v(1, 0, 1)); // +x
    return t;
}

} // namespace

TriangleMesh box(Vec3 size, Vec3 origin)
{
    return TriangleMesh::from_triangles(box_soup(size, origin), "box");
}

TriangleMesh open_box(Vec3 size)
{
    auto t = box_soup(size, {});
    t.erase(t.begin() + 2, t.begin() + 4); // top face
    return TriangleMesh::from_triangles(t, "open_box");
}

TriangleMesh box_with_channel(double outer, double channel)
{
    const double a = 0.5 * (outer - channel), b = a + channel, h = outer;
    // Outer and inner rings, CCW.
    const Vec2 o[4] = { { 0, 0 }, { outer, 0 }, { outer, outer }, { 0, outer } };
    const Vec2 in[4] = { { a, a }, { b, a }, { b, b }, { a, b } };
    std::vector<Triangle> t;
    for (int i = 0; i < 4; ++i) {
        const int j = (i + 1) % 4;
        auto P = [](Vec2 p, double z) { return Vec3 { p.x, p.y, z }; };
        // Top annulus (+z) and bottom annulus (-z).
        quad(t, P(o[i], h), P(o[j], h), P(in[j], h), P(in[i], h));
        quad(t, P(o[i], 0), P(in[i], 0), P(in[j], 0), P(o[j], 0));
        // Outer wall faces away from the centre, channel wall towards it.
        quad(t, P(o[i], 0), P(o[j], 0), P(o[j], h), P(o[i], h));
        quad(t, P(in[i], 0), P(in[i], h), P(in[j], h), P(in[j], 0));
    }
    return TriangleMesh::from_triangles(t, "box_with_channel");
}

TriangleMesh unit_tetrahedron()
{
    const Vec3 p0 { 0, 0, 0 }, p1 { 1, 0, 0 }, p2 { 0, 1, 0 }, p3 { 0, 0, 1 };
    std::vector<Triangle> t { { p0, p2, p1 }, { p0, p1, p3 }, { p0, p3, p2 }, { p1, p2, p3 } };
    return TriangleMesh::from_triangles(t, "tetrahedron");
}

TriangleMesh prism(const std::vector<Vec2>& poly, double z0, double z1)
{
    std::vector<Triangle> t;
    const std::size_t     n = poly.size();
    auto P = [](Vec2 p, double z) { return Vec3 { p.x, p.y, z }; };
    for (std::size_t i = 1; i + 1 < n; ++i) {
        t.push_back({ P(poly[0], z1), P(poly[i], z1), P(poly[i + 1], z1) });
        t.push_back({ P(poly[0], z0), P(poly[i + 1], z0), P(poly[i], z0) });
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        quad(t, P(poly[i], z0), P(poly[j], z0), P(poly[j], z1), P(poly[i], z1));
    }
    return TriangleMesh::from_triangles(t, "prism");
}

TriangleMesh tall_membrane(double thickness, double height)
{
    return box({ thickness, 20., height });
}

TriangleMesh floating_plate()
{
    return box({ 20., 20., 2. }, { 0., 0., 10. });
}

TriangleMesh bridge_part(double span)
{
    const double w = 5., depth = 10., h = 5., slab = 2.;
    auto         t = box_soup({ w, depth, h }, {});
    auto         r = box_soup({ w, depth, h }, { w + span, 0., 0. });
    auto         s = box_soup({ 2 * w + span, depth, slab }, { 0., 0., h });
    // Touching boxes are not a manifold union, but slicing treats each layer
    // as the union of closed loops, which is all the bridge tests need.
    t.insert(t.end(), r.begin(), r.end());
    t.insert(t.end(), s.begin(), s.end());
    return TriangleMesh::from_triangles(t, "bridge");
}

TriangleMesh sloped_wall(double deg)
{
    // Parallelogram prism in XZ, extruded along Y; the underside leans at `deg` from vertical.
    const double h = 10., off = h * std::tan(deg * std::numbers::pi / 180.), w = 4., d = 10.;
    const Vec3 a { 0, 0, 0 }, b { w, 0, 0 }, c { w + off, 0, h }, e { off, 0, h };
    const Vec3 dy { 0, d, 0 };
    std::vector<Triangle> t;
    quad(t, a, b, c, e);                         // front, -y
    quad(t, a + dy, e + dy, c + dy, b + dy);     // back, +y
    quad(t, a, a + dy, b + dy, b);               // bottom
    quad(t, e, c, c + dy, e + dy);               // top
    quad(t, a, e, e + dy, a + dy);               // left slope
    quad(t, b, b + dy, c + dy, c);               // right slope, faces down
    return TriangleMesh::from_triangles(t, "sloped");
}

TriangleMesh rotated(const TriangleMesh& mesh, double ax, double ay, double az)
{
    auto rot = [&](Vec3 p) {
        const double cx = std::cos(ax), sx = std::sin(ax), cy = std::cos(ay), sy = std::sin(ay), cz = std::cos(az),
                     sz = std::sin(az);
        p = { p.x, cx * p.y - sx * p.z, sx * p.y + cx * p.z };
        p = { cy * p.x + sy * p.z, p.y, -sy * p.x + cy * p.z };
        return Vec3 { cz * p.x - sz * p.y, sz * p.x + cz * p.y, p.z };
    };
    std::vector<Triangle> t;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        Triangle tri = mesh.triangle(i);
        for (Vec3& v : tri)
            v = rot(v);
        t.push_back(tri);
    }
    return TriangleMesh::from_triangles(t, mesh.source_name);
}

namespace {

TriangleMesh ellipsoid(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> radius(2., 15.);
    std::uniform_int_distribution<int>     seg(6, 24);
    const double rx = radius(rng), ry = radius(rng), rz = radius(rng);
    const int    nu = seg(rng), nv = seg(rng) / 2 + 2;
    auto P = [&](int i, int j) {
        const double th = std::numbers::pi * j / nv, ph = 2. * std::numbers::pi * i / nu;
        if (j == 0)
            return Vec3 { 0, 0, rz };
        if (j == nv)
            return Vec3 { 0, 0, -rz };
        return Vec3 { rx * std::sin(th) * std::cos(ph), ry * std::sin(th) * std::sin(ph), rz * std::cos(th) };
    };
    std::vector<Triangle> t;
    for (int j = 0; j < nv; ++j)
        for (int i = 0; i < nu; ++i) {
            const int i2 = (i + 1) % nu;
            if (j > 0)
                t.push_back({ P(i, j), P(i, j + 1), P(i2, j) });
            if (j + 1 < nv)
                t.push_back({ P(i2, j), P(i, j + 1), P(i2, j + 1) });
        }
    return TriangleMesh::from_triangles(t, "ellipsoid");
}

std::vector<Vec2> random_convex_polygon(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-12., 12.);
    std::vector<Vec2>                      pts(12);
    for (Vec2& p : pts)
        p = { u(rng), u(rng) };
    // Monotone chain hull, CCW.
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    std::vector<Vec2> h(2 * pts.size());
    std::size_t       k = 0;
    auto turn = [](Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && turn(h[k - 2], h[k - 1], pts[i]) <= 0)
            --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && turn(h[k - 2], h[k - 1], pts[i - 1]) <= 0)
            --k;
        h[k++] = pts[i - 1];
    }
    h.resize(k - 1);
    return h;
}

} // namespace

TriangleMesh random_convex(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> angle(0., 2. * std::numbers::pi);
    std::uniform_real_distribution<double> len(1., 25.);
    TriangleMesh                           m;
    switch (rng() % 3) {
    case 0: m = ellipsoid(rng); break;
    case 1: m = prism(random_convex_polygon(rng), 0., len(rng)); break;
    default: m = box({ len(rng), len(rng), len(rng) }); break;
    }
    return rotated(m, angle(rng), angle(rng), angle(rng));
}

double reference_volume(const TriangleMesh& mesh)
{
    // Divergence theorem with F = (0, 0, z): V = sum over faces of z_centroid * n_z * area.
    double v = 0.;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const Triangle t  = mesh.triangle(i);
        const Vec3     e1 = t[1] - t[0], e2 = t[2] - t[0];
        const double   nz_area2 = e1.x * e2.y - e1.y * e2.x; // 2 * area * n_z
        v += (t[0].z + t[1].z + t[2].z) / 3. * 0.5 * nz_area2;
    }
    return v;
}

} // namespace fixtures
