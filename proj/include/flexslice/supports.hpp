#pragma once

#include "flexslice/mesh_io.hpp"
#include "flexslice/pathgen.hpp"

#include <optional>
#include <span>
#include <vector>

namespace flexslice {

// Overhang angle limits measured from vertical. Hanging features are in
// tension when printing upside down, so that mode tolerates steeper faces.
struct OverhangThresholds
{
    double standard_deg    = 45.;
    double upside_down_deg = 60.;

    double for_mode(Orientation mode) const
    {
        return mode == Orientation::upside_down ? upside_down_deg : standard_deg;
    }
};

// Edge-connected set of downward-facing triangles.
struct FacetRegion
{
    std::vector<Triangle> triangles;

    double       area() const;
    BoundingBox3 bounding_box() const;
};

// Triangles with normal_z < -sin(threshold), grouped by shared edges. Faces
// lying on the bed are never overhangs.
std::vector<FacetRegion> detect_overhangs(const TriangleMesh& mesh, double threshold_deg);
std::vector<FacetRegion> detect_overhangs(const TriangleMesh& mesh, const OverhangThresholds& thresholds,
                                          Orientation mode);

// One thin column growing from the bed straight up into the part.
struct AeroColumn
{
    Vec2   center;
    double width  = 0.;
    double z_base = 0.;
    double z_top  = 0.;
};

struct AeroSupportParams
{
    double grid_spacing     = 3.0;
    double column_width     = 0.8;
    double extrusion_width  = 0.4;
    // Columns shorter than two layers are dropped.
    double layer_height     = 0.2;
};

// Lowest height at which a vertical line through xy meets the region.
std::optional<double> vertical_hit(const FacetRegion& region, Vec2 xy);

// Points sampled over the region's triangles at roughly `spacing`.
std::vector<Vec3> sample_region(const FacetRegion& region, double spacing);

// Columns on a square lattice centred on each region's footprint, plus extra
// columns where a region point would otherwise be farther than
// grid_spacing * sqrt(2) / 2 from every column. Throws ConfigError when the
// column width leaves [1, 3] x extrusion width or the spacing is too tight.
std::vector<AeroColumn> generate_aero_supports(std::span<const FacetRegion> regions, const AeroSupportParams& params);

// Marks the samples lying within `radius` (in XY) of some column centre.
std::vector<bool> coverage_mask(std::span<const Vec3> samples, std::span<const AeroColumn> columns, double radius);

// Support strands for one layer: ceil(width / extrusion_width) parallel lines
// filling the column's square footprint. Columns below `layer_top_z` only.
std::vector<ToolPath> support_layer_paths(std::span<const AeroColumn> columns, int layer_index, double layer_top_z,
                                          double extrusion_width, int first_island_id);

// Deposited volume of the columns' strands over a layer stack, in mm^3.
double support_volume(std::span<const AeroColumn> columns, std::span<const LayerSlice> layers,
                      double extrusion_width);

} // namespace flexslice
