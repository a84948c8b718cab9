#pragma once

#include "flexslice/geometry.hpp"

#include <span>
#include <vector>

namespace flexslice {

// Grid used to stitch slice segments and to drop near-duplicate vertices.
inline constexpr double kSnapTolerance = 1e-3;

// Closed loop; the closing edge back to points.front() is implicit.
// Outer boundaries are counter-clockwise, holes clockwise.
struct Contour
{
    std::vector<Vec2> points;
    bool              is_hole = false;

    double       signed_area() const;
    double       perimeter() const;
    BoundingBox2 bounding_box() const;
};

double signed_area(std::span<const Vec2> ring);
BoundingBox2 bounding_box(std::span<const Contour> region);

// Crossing-number test against one ring.
bool point_in_ring(std::span<const Vec2> ring, Vec2 p);
// Even-odd test against a set of contours, i.e. inside an outer and not in a hole.
bool point_in_region(std::span<const Contour> region, Vec2 p);
double region_area(std::span<const Contour> region);

// Cleans raw loops (near-duplicate and collinear vertices, slivers), classifies
// holes by nesting depth and fixes orientation to match.
std::vector<Contour> normalize_loops(std::vector<std::vector<Vec2>> loops);

// Groups a region into islands: one outer contour followed by the holes it
// directly contains. Output order follows the outer contours.
std::vector<std::vector<Contour>> split_islands(std::span<const Contour> region);

// Region offset. Positive delta dilates the solid, negative erodes it. Miter
// joins are squared off beyond 2x delta; collapsed regions vanish.
std::vector<Contour> offset_contours(std::span<const Contour> region, double delta);

// Morphological opening by a disc of the given radius: whatever a ball that
// size can reach inside the region. Never larger than the input.
std::vector<Contour> opening(std::span<const Contour> region, double radius);

std::vector<Contour> region_union(std::span<const Contour> a, std::span<const Contour> b);
std::vector<Contour> region_difference(std::span<const Contour> a, std::span<const Contour> b);
std::vector<Contour> region_intersection(std::span<const Contour> a, std::span<const Contour> b);

std::vector<Vec2> convex_hull(std::vector<Vec2> points);

// Minimum caliper width of a point set (over its convex hull).
double min_feret_diameter(std::span<const Vec2> points);

// Minimum-area enclosing rectangle.
struct OrientedBox
{
    Vec2   center;
    double long_side   = 0.;
    double short_side  = 0.;
    double long_angle  = 0.; // radians, direction of the long side
};
OrientedBox min_area_rectangle(std::span<const Vec2> points);

} // namespace flexslice
