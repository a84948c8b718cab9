#include "flexslice/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace flexslice {

double signed_area(std::span<const Vec2> ring)
{
    const std::size_t n = ring.size();
    if (n < 3)
        return 0.;
    double a = 0.;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        a += cross(ring[j], ring[i]);
    return 0.5 * a;
}

double Contour::signed_area() const { return flexslice::signed_area(points); }

double Contour::perimeter() const
{
    double l = 0.;
    for (std::size_t i = 0, j = points.size() - 1; i < points.size(); j = i++)
        l += distance(points[j], points[i]);
    return l;
}

BoundingBox2 Contour::bounding_box() const
{
    BoundingBox2 bb;
    for (Vec2 p : points)
        bb.merge(p);
    return bb;
}

BoundingBox2 bounding_box(std::span<const Contour> region)
{
    BoundingBox2 bb;
    for (const Contour& c : region)
        for (Vec2 p : c.points)
            bb.merge(p);
    return bb;
}

bool point_in_ring(std::span<const Vec2> ring, Vec2 p)
{
    bool inside = false;
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
        const Vec2 a = ring[j], b = ring[i];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x)
                inside = !inside;
        }
    }
    return inside;
}

bool point_in_region(std::span<const Contour> region, Vec2 p)
{
    bool inside = false;
    for (const Contour& c : region)
        if (point_in_ring(c.points, p))
            inside = !inside;
    return inside;
}

double region_area(std::span<const Contour> region)
{
    double a = 0.;
    for (const Contour& c : region)
        a += c.signed_area();
    return a;
}

namespace {

// Drops near-duplicate and collinear vertices until stable.
std::vector<Vec2> clean_ring(std::vector<Vec2> pts)
{
    constexpr double kCollinear = 1e-7;
    bool changed = true;
    while (changed && pts.size() >= 3) {
        changed = false;
        std::vector<Vec2> out;
        out.reserve(pts.size());
        for (Vec2 p : pts)
            if (out.empty() || distance(out.back(), p) >= kSnapTolerance)
                out.push_back(p);
            else
                changed = true;
        while (out.size() > 1 && distance(out.back(), out.front()) < kSnapTolerance) {
            out.pop_back();
            changed = true;
        }
        pts.swap(out);
        if (pts.size() < 3)
            break;

        out.clear();
        const std::size_t n = pts.size();
        std::vector<bool> keep(n, true);
        for (std::size_t i = 0; i < n; ++i) {
            // Compare against the last kept predecessor so runs of collinear points collapse.
            std::size_t prev = (i + n - 1) % n;
            while (!keep[prev] && prev != i)
                prev = (prev + n - 1) % n;
            const Vec2 a = pts[prev], b = pts[i], c = pts[(i + 1) % n];
            if (distance_to_segment(b, a, c) < kCollinear) {
                keep[i] = false;
                changed = true;
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            if (keep[i])
                out.push_back(pts[i]);
        pts.swap(out);
    }
    if (pts.size() < 3)
        pts.clear();
    return pts;
}

} // namespace

std::vector<Contour> normalize_loops(std::vector<std::vector<Vec2>> loops)
{
    constexpr double kMinArea = 1e-8;
    std::vector<std::vector<Vec2>> rings;
    rings.reserve(loops.size());
    for (auto& l : loops) {
        auto r = clean_ring(std::move(l));
        if (r.size() >= 3 && std::abs(signed_area(r)) > kMinArea)
            rings.push_back(std::move(r));
    }

    std::vector<BoundingBox2> boxes(rings.size());
    for (std::size_t i = 0; i < rings.size(); ++i)
        for (Vec2 p : rings[i])
            boxes[i].merge(p);

    std::vector<int> depth(rings.size(), 0);
    for (std::size_t i = 0; i < rings.size(); ++i) {
        const Vec2 probe = rings[i].front();
        for (std::size_t j = 0; j < rings.size(); ++j) {
            if (i == j)
                continue;
            const BoundingBox2& b = boxes[j];
            if (probe.x < b.min.x || probe.x > b.max.x || probe.y < b.min.y || probe.y > b.max.y)
                continue;
            if (point_in_ring(rings[j], probe))
                ++depth[i];
        }
    }

    std::vector<Contour> out;
    out.reserve(rings.size());
    for (std::size_t i = 0; i < rings.size(); ++i) {
        Contour c;
        c.is_hole = depth[i] % 2 == 1;
        c.points  = std::move(rings[i]);
        if ((c.signed_area() < 0.) != c.is_hole)
            std::reverse(c.points.begin(), c.points.end());
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<std::vector<Contour>> split_islands(std::span<const Contour> region)
{
    std::vector<std::size_t> outers;
    for (std::size_t i = 0; i < region.size(); ++i)
        if (!region[i].is_hole)
            outers.push_back(i);

    std::vector<std::vector<Contour>> islands(outers.size());
    std::vector<double>               areas(outers.size());
    for (std::size_t k = 0; k < outers.size(); ++k) {
        islands[k].push_back(region[outers[k]]);
        areas[k] = std::abs(region[outers[k]].signed_area());
    }
    for (const Contour& c : region) {
        if (!c.is_hole || c.points.empty())
            continue;
        std::size_t best      = outers.size();
        double      best_area = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < outers.size(); ++k)
            if (areas[k] < best_area && point_in_ring(region[outers[k]].points, c.points.front())) {
                best      = k;
                best_area = areas[k];
            }
        if (best < outers.size())
            islands[best].push_back(c);
    }
    return islands;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts)
{
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3)
        return pts;
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t       k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.)
            --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0.)
            --k;
        hull[k++] = pts[i - 1];
    }
    hull.resize(k - 1);
    return hull;
}

double min_feret_diameter(std::span<const Vec2> points)
{
    const std::vector<Vec2> hull = convex_hull({ points.begin(), points.end() });
    if (hull.size() < 3)
        return 0.;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec2   a   = hull[i];
        const Vec2   e   = hull[(i + 1) % hull.size()] - a;
        const double len = norm(e);
        if (len <= 0.)
            continue;
        double w = 0.;
        for (Vec2 p : hull)
            w = std::max(w, std::abs(cross(e, p - a)) / len);
        best = std::min(best, w);
    }
    return best;
}

OrientedBox min_area_rectangle(std::span<const Vec2> points)
{
    OrientedBox             box;
    const std::vector<Vec2> hull = convex_hull({ points.begin(), points.end() });
    if (hull.empty())
        return box;
    if (hull.size() < 3) {
        const Vec2 a = hull.front(), b = hull.back();
        box.center     = (a + b) * 0.5;
        box.long_side  = distance(a, b);
        box.long_angle = box.long_side > 0. ? std::atan2(b.y - a.y, b.x - a.x) : 0.;
        return box;
    }
    double best_area = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec2   e   = hull[(i + 1) % hull.size()] - hull[i];
        const double len = norm(e);
        if (len <= 0.)
            continue;
        const Vec2 u = e * (1. / len);
        const Vec2 v { -u.y, u.x };
        double     umin = INFINITY, umax = -INFINITY, vmin = INFINITY, vmax = -INFINITY;
        for (Vec2 p : hull) {
            umin = std::min(umin, dot(p, u));
            umax = std::max(umax, dot(p, u));
            vmin = std::min(vmin, dot(p, v));
            vmax = std::max(vmax, dot(p, v));
        }
        const double area = (umax - umin) * (vmax - vmin);
        if (area < best_area - 1e-12) {
            best_area        = area;
            const double du  = umax - umin, dv = vmax - vmin;
            box.center       = u * (0.5 * (umin + umax)) + v * (0.5 * (vmin + vmax));
            box.long_side    = std::max(du, dv);
            box.short_side   = std::min(du, dv);
            box.long_angle   = du >= dv ? std::atan2(u.y, u.x) : std::atan2(v.y, v.x);
        }
    }
    return box;
}

} // namespace flexslice
