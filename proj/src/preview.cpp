#include "flexslice/preview.hpp"

#include <array>
#include <cstdio>

namespace flexslice {

std::string_view role_colour(PathRole role)
{
    switch (role) {
    case PathRole::outer_perimeter: return "#d62728";
    case PathRole::inner_perimeter: return "#ff7f0e";
    case PathRole::infill: return "#1f77b4";
    case PathRole::bridge: return "#9467bd";
    case PathRole::support: return "#2ca02c";
    case PathRole::travel: return "#7f7f7f";
    }
    return "#000000";
}

namespace {

std::string f3(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace

std::string render_layer_svg(std::span<const ToolPath> paths, int layer_index, double z, Vec2 extent)
{
    const double legend_h = 14.;
    const double height   = extent.y + legend_h;
    std::string  svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f3(extent.x) + "mm\" height=\"" + f3(height) +
           "mm\" viewBox=\"0 0 " + f3(extent.x) + " " + f3(height) + "\">\n";
    svg += "<title>layer " + std::to_string(layer_index) + " z=" + f3(z) + "</title>\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + f3(extent.x) + "\" height=\"" + f3(extent.y) +
           "\" fill=\"#ffffff\" stroke=\"#cccccc\" stroke-width=\"0.2\"/>\n";

    // Machine Y grows upwards; SVG Y grows downwards.
    svg += "<g fill=\"none\" stroke-linecap=\"round\" stroke-linejoin=\"round\">\n";
    for (const ToolPath& p : paths) {
        if (p.points.size() < 2)
            continue;
        const bool travel = p.role == PathRole::travel;
        svg += p.closed ? "<polygon points=\"" : "<polyline points=\"";
        for (std::size_t i = 0; i < p.points.size(); ++i) {
            if (i)
                svg += ' ';
            svg += f3(p.points[i].x) + "," + f3(extent.y - p.points[i].y);
        }
        svg += "\" stroke=\"" + std::string(role_colour(p.role)) + "\" stroke-width=\"" +
               f3(travel ? 0.1 : p.width) + "\"";
        if (travel)
            svg += " stroke-dasharray=\"0.5,0.5\"";
        svg += " class=\"" + std::string(to_string(p.role)) + "\"/>\n";
    }
    svg += "</g>\n";

    static constexpr std::array roles { PathRole::outer_perimeter, PathRole::inner_perimeter, PathRole::infill,
                                        PathRole::bridge, PathRole::support, PathRole::travel };
    svg += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"3\">\n";
    for (std::size_t i = 0; i < roles.size(); ++i) {
        const std::string name(to_string(roles[i]));
        const double      x = 2. + 40. * static_cast<double>(i % 3);
        const double      y = extent.y + 3. + 4. * static_cast<double>(i / 3);
        svg += "<line x1=\"" + f3(x) + "\" y1=\"" + f3(y) + "\" x2=\"" + f3(x + 5.) + "\" y2=\"" + f3(y) +
               "\" stroke=\"" + std::string(role_colour(roles[i])) + "\" stroke-width=\"1\"/>";
        svg += "<text x=\"" + f3(x + 6.) + "\" y=\"" + f3(y + 1.) + "\">" + name + "</text>\n";
    }
    svg += "<text x=\"2\" y=\"" + f3(extent.y + 12.) + "\">layer " + std::to_string(layer_index) + "  z " + f3(z) +
           " mm</text>\n";
    svg += "</g>\n</svg>\n";
    return svg;
}

} // namespace flexslice
