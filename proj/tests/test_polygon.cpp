#include "doctest.h"

#include "flexslice/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace flexslice;

namespace {

Contour rect(double x0, double y0, double x1, double y1, bool hole = false)
{
    Contour c;
    c.points = { { x0, y0 }, { x1, y0 }, { x1, y1 }, { x0, y1 } };
    if (hole)
        std::reverse(c.points.begin(), c.points.end());
    c.is_hole = hole;
    return c;
}

BoundingBox2 bbox_of(const Contour& c) { return c.bounding_box(); }

} // namespace

TEST_SUITE("polygon")
{
    TEST_CASE("erosion of a square by 1 gives an 8x8 square")
    {
        const std::vector<Contour> sq { rect(0, 0, 10, 10) };
        const auto                 r = offset_contours(sq, -1.);
        REQUIRE(r.size() == 1);
        const auto bb = bbox_of(r[0]);
        CHECK(bb.min.x == doctest::Approx(1.));
        CHECK(bb.min.y == doctest::Approx(1.));
        CHECK(bb.max.x == doctest::Approx(9.));
        CHECK(bb.max.y == doctest::Approx(9.));
        CHECK(r[0].signed_area() == doctest::Approx(64.));
    }

    TEST_CASE("erosion beyond half width vanishes")
    {
        const std::vector<Contour> sq { rect(0, 0, 10, 10) };
        CHECK(offset_contours(sq, -6.).empty());
    }

    TEST_CASE("erosion moves holes outwards")
    {
        const std::vector<Contour> region { rect(0, 0, 10, 10), rect(3, 3, 7, 7, true) };
        const auto                 r = offset_contours(region, -0.5);
        REQUIRE(r.size() == 2);
        const auto outer = std::find_if(r.begin(), r.end(), [](const Contour& c) { return !c.is_hole; });
        const auto hole  = std::find_if(r.begin(), r.end(), [](const Contour& c) { return c.is_hole; });
        REQUIRE(outer != r.end());
        REQUIRE(hole != r.end());
        CHECK(outer->signed_area() == doctest::Approx(81.));
        CHECK(hole->signed_area() == doctest::Approx(-25.));
        CHECK(bbox_of(*hole).min.x == doctest::Approx(2.5));
        CHECK(bbox_of(*hole).max.x == doctest::Approx(7.5));
    }

    TEST_CASE("dilation of a square keeps corner spikes bounded")
    {
        const std::vector<Contour> sq { rect(0, 0, 10, 10) };
        const auto                 r = offset_contours(sq, 1.);
        REQUIRE(r.size() == 1);
        const auto bb = bbox_of(r[0]);
        CHECK(bb.min.x >= -2. - 1e-9);
        CHECK(bb.max.x <= 12. + 1e-9);
        CHECK(r[0].signed_area() > 100.);
        CHECK(r[0].signed_area() <= 144. + 1e-9);
    }

    TEST_CASE("opening never grows a region")
    {
        std::mt19937_64                        rng(21);
        std::uniform_real_distribution<double> u(0., 20.);
        std::uniform_real_distribution<double> d(0.1, 2.);
        for (int k = 0; k < 30; ++k) {
            // Star-shaped polygon around (10,10).
            std::vector<std::vector<Vec2>> loops(1);
            const int n = 5 + static_cast<int>(rng() % 10);
            for (int i = 0; i < n; ++i) {
                const double a = 2. * std::numbers::pi * i / n, r = 2. + u(rng) / 2.;
                loops[0].push_back({ 10. + r * std::cos(a), 10. + r * std::sin(a) });
            }
            const auto region = normalize_loops(loops);
            const double delta = d(rng);
            const auto opened = opening(region, delta);
            for (int s = 0; s < 400; ++s) {
                const Vec2 p { u(rng), u(rng) };
                if (point_in_region(opened, p)) {
                    // Allow for the boundary: the point must be inside or within a hair of the original.
                    bool near = point_in_region(region, p);
                    for (const Contour& c : region)
                        for (std::size_t i = 0; !near && i < c.points.size(); ++i)
                            near = distance_to_segment(p, c.points[i], c.points[(i + 1) % c.points.size()]) < 1e-6;
                    CHECK(near);
                }
            }
        }
    }

    TEST_CASE("normalize_loops fixes orientation by nesting depth")
    {
        std::vector<std::vector<Vec2>> loops {
            { { 0, 0 }, { 0, 10 }, { 10, 10 }, { 10, 0 } }, // clockwise outer
            { { 2, 2 }, { 8, 2 }, { 8, 8 }, { 2, 8 } },     // CCW hole
            { { 4, 4 }, { 4, 6 }, { 6, 6 }, { 6, 4 } },     // island inside the hole
        };
        const auto r = normalize_loops(loops);
        REQUIRE(r.size() == 3);
        int holes = 0;
        for (const Contour& c : r) {
            CHECK((c.signed_area() < 0) == c.is_hole);
            holes += c.is_hole;
        }
        CHECK(holes == 1);
        CHECK(region_area(r) == doctest::Approx(100. - 36. + 4.));
        CHECK(split_islands(r).size() == 2);
    }

    TEST_CASE("normalize_loops removes collinear and near-duplicate points")
    {
        std::vector<std::vector<Vec2>> loops { { { 0, 0 }, { 5, 0 }, { 10, 0 }, { 10, 10 }, { 10, 10.0000001 }, { 0, 10 } } };
        const auto r = normalize_loops(loops);
        REQUIRE(r.size() == 1);
        CHECK(r[0].points.size() == 4);
    }

    TEST_CASE("boolean operations on rectangles")
    {
        const std::vector<Contour> a { rect(0, 0, 10, 10) }, b { rect(5, 0, 15, 10) };
        CHECK(region_area(region_union(a, b)) == doctest::Approx(150.));
        CHECK(region_area(region_intersection(a, b)) == doctest::Approx(50.));
        CHECK(region_area(region_difference(a, b)) == doctest::Approx(50.));
        CHECK(region_difference(a, a).empty());
    }

    TEST_CASE("feret diameter and minimum-area rectangle")
    {
        const std::vector<Vec2> pts { { 0, 0 }, { 4, 0 }, { 4, 1 }, { 0, 1 } };
        CHECK(min_feret_diameter(pts) == doctest::Approx(1.));
        const OrientedBox ob = min_area_rectangle(pts);
        CHECK(ob.long_side == doctest::Approx(4.));
        CHECK(ob.short_side == doctest::Approx(1.));

        // Rotated rectangle: sides survive rotation.
        std::vector<Vec2> rot;
        const double      a = 0.6;
        for (Vec2 p : pts)
            rot.push_back({ p.x * std::cos(a) - p.y * std::sin(a), p.x * std::sin(a) + p.y * std::cos(a) });
        const OrientedBox rb = min_area_rectangle(rot);
        CHECK(rb.long_side == doctest::Approx(4.));
        CHECK(rb.short_side == doctest::Approx(1.));
        CHECK(std::abs(std::sin(rb.long_angle - a)) == doctest::Approx(0.).epsilon(1e-9));
        CHECK(min_feret_diameter(rot) == doctest::Approx(1.));
    }

    TEST_CASE("point_in_region honours holes")
    {
        const std::vector<Contour> region { rect(0, 0, 10, 10), rect(3, 3, 7, 7, true) };
        CHECK(point_in_region(region, { 1, 1 }));
        CHECK_FALSE(point_in_region(region, { 5, 5 }));
        CHECK_FALSE(point_in_region(region, { 11, 5 }));
    }
}
