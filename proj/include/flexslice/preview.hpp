#pragma once

#include "flexslice/pathgen.hpp"

#include <span>
#include <string>

namespace flexslice {

// One layer as SVG: centrelines stroked at the path width, 1 user unit = 1 mm,
// Y pointing up, colour by role with a legend. `extent` is the drawing area
// (usually the build plate).
std::string render_layer_svg(std::span<const ToolPath> paths, int layer_index, double z, Vec2 extent);

// Stroke colour for a role, as a CSS hex string.
std::string_view role_colour(PathRole role);

} // namespace flexslice
