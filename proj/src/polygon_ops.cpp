// Region booleans and offsetting on top of Boost.Geometry.
#include "flexslice/polygon.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include <algorithm>
#include <cmath>

namespace flexslice {

namespace bg = boost::geometry;

namespace {

using BPoint = bg::model::d2::point_xy<double>;
// Counter-clockwise outers, closed rings.
using BPolygon = bg::model::polygon<BPoint, false, true>;
using BMulti   = bg::model::multi_polygon<BPolygon>;

template <class Ring>
void fill_ring(Ring& ring, const std::vector<Vec2>& pts)
{
    ring.clear();
    for (Vec2 p : pts)
        ring.emplace_back(p.x, p.y);
    if (!pts.empty())
        ring.emplace_back(pts.front().x, pts.front().y);
}

BMulti to_multi(std::span<const Contour> region)
{
    BMulti out;
    for (const auto& island : split_islands(region)) {
        BPolygon poly;
        fill_ring(poly.outer(), island.front().points);
        for (std::size_t h = 1; h < island.size(); ++h) {
            poly.inners().emplace_back();
            fill_ring(poly.inners().back(), island[h].points);
        }
        bg::correct(poly);
        out.push_back(std::move(poly));
    }
    return out;
}

template <class Ring>
std::vector<Vec2> ring_points(const Ring& ring)
{
    std::vector<Vec2> pts;
    pts.reserve(ring.size());
    for (const BPoint& p : ring)
        pts.push_back({ p.x(), p.y() });
    if (pts.size() > 1 && pts.front() == pts.back())
        pts.pop_back();
    return pts;
}

std::vector<Contour> from_multi(const BMulti& multi)
{
    std::vector<std::vector<Vec2>> loops;
    for (const BPolygon& poly : multi) {
        loops.push_back(ring_points(poly.outer()));
        for (const auto& inner : poly.inners())
            loops.push_back(ring_points(inner));
    }
    return normalize_loops(std::move(loops));
}

} // namespace

std::vector<Contour> offset_contours(std::span<const Contour> region, double delta)
{
    if (region.empty())
        return {};
    if (delta == 0.)
        return { region.begin(), region.end() };

    const BMulti in = to_multi(region);
    BMulti       out;
    bg::strategy::buffer::distance_symmetric<double> distance(delta);
    bg::strategy::buffer::side_straight              side;
    bg::strategy::buffer::join_miter                 join(2.0);
    bg::strategy::buffer::end_flat                   end;
    bg::strategy::buffer::point_square               point;
    bg::buffer(in, out, distance, side, join, end, point);
    return from_multi(out);
}

std::vector<Contour> opening(std::span<const Contour> region, double radius)
{
    if (region.empty() || !(radius > 0.))
        return { region.begin(), region.end() };

    bg::strategy::buffer::side_straight side;
    bg::strategy::buffer::join_round    join(360);
    bg::strategy::buffer::end_flat      end;
    bg::strategy::buffer::point_circle  point(360);

    const BMulti in = to_multi(region);
    BMulti       eroded, grown, clipped;
    bg::buffer(in, eroded, bg::strategy::buffer::distance_symmetric<double>(-radius), side, join, end, point);
    if (eroded.empty())
        return {};
    bg::buffer(eroded, grown, bg::strategy::buffer::distance_symmetric<double>(radius), side, join, end, point);
    // Round joins are polygonal; clipping removes the chord error.
    bg::intersection(grown, in, clipped);
    return from_multi(clipped);
}

std::vector<Contour> region_union(std::span<const Contour> a, std::span<const Contour> b)
{
    BMulti out;
    bg::union_(to_multi(a), to_multi(b), out);
    return from_multi(out);
}

std::vector<Contour> region_difference(std::span<const Contour> a, std::span<const Contour> b)
{
    if (a.empty())
        return {};
    if (b.empty())
        return { a.begin(), a.end() };
    BMulti out;
    bg::difference(to_multi(a), to_multi(b), out);
    return from_multi(out);
}

std::vector<Contour> region_intersection(std::span<const Contour> a, std::span<const Contour> b)
{
    if (a.empty() || b.empty())
        return {};
    BMulti out;
    bg::intersection(to_multi(a), to_multi(b), out);
    return from_multi(out);
}

} // namespace flexslice
