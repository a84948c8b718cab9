#pragma once

#include "flexslice/slice_core.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace flexslice {

enum class PathRole
{
    outer_perimeter,
    inner_perimeter,
    infill,
    bridge,
    support,
    travel,
};

std::string_view to_string(PathRole role);

struct ToolPath
{
    std::vector<Vec2> points;
    PathRole          role        = PathRole::infill;
    double            width       = 0.;
    int               layer_index = 0;
    bool              closed      = false;
    // Paths sharing an island id are printed together, perimeters first.
    // -1 makes the path its own group.
    int island = -1;

    bool   extrudes() const { return role != PathRole::travel; }
    Vec2   start() const { return points.front(); }
    // Where the nozzle ends up; closed loops return to their start.
    Vec2   end() const { return closed ? points.front() : points.back(); }
    double length() const;
};

// Checks the ToolPath invariants: >= 2 points, extruding width within
// [0.5, 3] x nozzle. Returns an empty string when valid.
std::string check_toolpath(const ToolPath& path, double nozzle_diameter);

// Perimeter k (0 = outermost) follows the region eroded by (k + 1/2) * width.
// Loops start at their rear-most (max Y, then min X) vertex.
std::vector<ToolPath> generate_perimeters(const LayerSlice& layer, int count, double width);

// Area left for infill inside `count` perimeters of the given island(s).
std::vector<Contour> infill_area(std::span<const Contour> region, int count, double width);

// Parallel lines at `angle_deg`, nominal spacing width / density. Lines keep
// width/4 clear of the region boundary plus a further width/4 at their ends.
// Throws ConfigError when density is outside [0, 1].
std::vector<ToolPath> generate_infill(std::span<const Contour> region, double density, double angle_deg, double width,
                                      int layer_index = 0, PathRole role = PathRole::infill);

inline constexpr double kBridgeSampleGrid = 0.5;

struct BridgeRegion
{
    std::vector<Contour> contours;
    double               max_span   = 0.; // long side of the minimum-area bounding rectangle
    double               min_span   = 0.;
    double               long_angle = 0.; // radians
    Vec2                 center;
};

// Parts of `layer` not covered by `below`, sampled on a grid. Components thinner
// than two grid cells are treated as slope noise and discarded.
std::vector<BridgeRegion> detect_bridges(const LayerSlice& layer, const LayerSlice& below,
                                         double grid = kBridgeSampleGrid);
// Per-layer bridges for a whole stack; the bed supports layer 0.
std::vector<std::vector<BridgeRegion>> detect_all_bridges(std::span<const LayerSlice> layers,
                                                          double grid = kBridgeSampleGrid);

// Orders one layer's extrusion paths and inserts travel moves, starting from
// `start`. Existing travel paths in the input are discarded.
std::vector<ToolPath> order_paths(std::vector<ToolPath> paths, Vec2 start);

// Sum of travel path lengths.
double travel_length(std::span<const ToolPath> paths);
// Travel needed to print the paths exactly in the given order.
double input_order_travel(std::span<const ToolPath> paths, Vec2 start);

} // namespace flexslice
