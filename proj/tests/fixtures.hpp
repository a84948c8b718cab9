#pragma once

#include "flexslice/mesh_io.hpp"

#include <random>
#include <vector>

namespace fixtures {

using flexslice::Triangle;
using flexslice::TriangleMesh;
using flexslice::Vec2;
using flexslice::Vec3;

// Axis-aligned box with outward winding.
TriangleMesh box(Vec3 size, Vec3 origin = {});
// Box with one face (two triangles) missing.
TriangleMesh open_box(Vec3 size);
// Cube of side `outer` with a centred square vertical through-channel.
TriangleMesh box_with_channel(double outer, double channel);
// (0,0,0),(1,0,0),(0,1,0),(0,0,1).
TriangleMesh unit_tetrahedron();
// Vertical prism over a convex CCW polygon.
TriangleMesh prism(const std::vector<Vec2>& polygon, double z0, double z1);
// 1 mm thick, 20 mm long, 118 mm tall wall standing on the bed.
TriangleMesh tall_membrane(double thickness = 1.0, double height = 118.);
// 20 x 20 plate spanning z in [10, 12].
TriangleMesh floating_plate();
// A bridge: two 5 mm pillars under a slab, gap `span` between them.
TriangleMesh bridge_part(double span);
// Box tilted so that one side wall overhangs at `deg` from vertical.
TriangleMesh sloped_wall(double deg);

// Random watertight convex meshes (ellipsoids, prisms, boxes), randomly rotated.
TriangleMesh random_convex(std::mt19937_64& rng);

TriangleMesh rotated(const TriangleMesh& mesh, double ax, double ay, double az);

// Signed volume with an independent divergence-theorem formula.
double reference_volume(const TriangleMesh& mesh);

} // namespace fixtures
