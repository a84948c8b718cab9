#pragma once

#include "flexslice/mesh_io.hpp"
#include "flexslice/polygon.hpp"

#include <optional>
#include <span>
#include <vector>

namespace flexslice {

// Vertices exactly on a slice plane are lifted by this much before intersecting.
inline constexpr double kPlanePerturbation = 1e-7;
inline constexpr double kMinLayerHeight    = 0.04;
inline constexpr double kMaxLayerHeight    = 1.0;

struct LayerSlice
{
    int                  index = 0;
    double               z     = 0.;  // slice plane, at the layer's vertical centre
    double               thickness = 0.;
    double               top_z = 0.;  // nozzle height when printing the layer
    std::vector<Contour> contours;
    int                  open_chains = 0; // chains that could not be closed and were dropped
};

struct Segment2
{
    Vec2 a;
    Vec2 b;
};

// Intersection of a triangle with the horizontal plane at z, oriented so that
// the solid lies to its left when the triangle winding is outward.
std::optional<Segment2> triangle_plane_segment(const Triangle& tri, double z);

// Slices at z_0 = first/2 and z_i = first + (i - 1/2) * layer_height above the
// mesh bottom. Throws ConfigError when layer_height is out of range.
// threads == 0 uses the hardware concurrency.
std::vector<LayerSlice> slice_mesh(const TriangleMesh& mesh, double layer_height, double first_layer_height,
                                   unsigned threads = 1);

} // namespace flexslice
