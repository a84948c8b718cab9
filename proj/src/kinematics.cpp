#include "flexslice/kinematics.hpp"

#include "flexslice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace flexslice {

void MachineProfile::validate() const
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0.) || !std::isfinite(v))
            throw ConfigError(std::string("machine profile: ") + name + " must be positive");
    };
    positive(filament_diameter, "filament_diameter");
    positive(reference_diameter, "reference_diameter");
    positive(nozzle_diameter, "nozzle_diameter");
    positive(max_accel, "max_accel");
    positive(max_travel_speed, "max_travel_speed");
    positive(max_volumetric_flow, "max_volumetric_flow");
    positive(speeds.outer_perimeter, "speed_outer_perimeter");
    positive(speeds.inner_perimeter, "speed_inner_perimeter");
    positive(speeds.infill, "speed_infill");
    positive(speeds.bridge, "speed_bridge");
    positive(speeds.support, "speed_support");
    positive(build_volume.x, "build_volume_x");
    positive(build_volume.y, "build_volume_y");
    positive(build_volume.z, "build_volume_z");
    positive(nozzle_temperature, "nozzle_temperature");
    positive(retraction_length, "retraction_length");
    positive(retraction_speed, "retraction_speed");
    if (!(bed_temperature >= 0.))
        throw ConfigError("machine profile: bed_temperature must be >= 0");
    if (!(fan_fraction >= 0. && fan_fraction <= 1.))
        throw ConfigError("machine profile: fan_fraction must be within [0, 1]");
}

double MachineProfile::speed_cap(PathRole role) const
{
    switch (role) {
    case PathRole::outer_perimeter: return speeds.outer_perimeter;
    case PathRole::inner_perimeter: return speeds.inner_perimeter;
    case PathRole::infill: return speeds.infill;
    case PathRole::bridge: return speeds.bridge;
    case PathRole::support: return speeds.support;
    case PathRole::travel: return max_travel_speed;
    }
    return max_travel_speed;
}

double MachineProfile::effective_flow() const
{
    // The cap is calibrated on the stiff filament; a thinner one buckles earlier.
    if (filament_diameter < reference_diameter)
        return max_volumetric_flow * std::min(1., buckling_headroom(filament_diameter, reference_diameter));
    return max_volumetric_flow;
}

double buckling_headroom(double d, double d_ref)
{
    if (!(d > 0.) || !(d_ref > 0.))
        throw ConfigError("buckling_headroom: diameters must be positive");
    const double r = d / d_ref;
    return (r * r) * (r * r);
}

double filament_area(double filament_d)
{
    return std::numbers::pi * 0.25 * filament_d * filament_d;
}

double compute_extrusion(double path_length, double width, double height, double filament_d)
{
    return path_length * width * height / filament_area(filament_d);
}

double limit_feedrate(const ToolPath& path, double layer_height, const MachineProfile& profile)
{
    if (!path.extrudes())
        return profile.max_travel_speed;
    return std::min(profile.speed_cap(path.role), profile.effective_flow() / (path.width * layer_height));
}

Move Move::make(Vec3 from, Vec3 to, double feedrate, double extrusion_length, PathRole role, bool retraction_enabled)
{
    if (!(feedrate > 0.))
        throw ConfigError("move feedrate must be positive");
    if (extrusion_length < 0. && !retraction_enabled)
        throw ConfigError("negative extrusion with retraction disabled");
    return Move { from, to, feedrate, extrusion_length, role };
}

double move_time(const Move& move, double accel)
{
    const double l = move.length();
    const double v = move.feedrate;
    if (l <= 0. || v <= 0.)
        return 0.;
    if (l >= v * v / accel)
        return 2. * (v / accel) + (l - v * v / accel) / v;
    return 2. * std::sqrt(l / accel);
}

double estimate_time(std::span<const Move> moves, double accel)
{
    double t = 0.;
    for (const Move& m : moves)
        t += move_time(m, accel);
    return t;
}

double estimate_time(std::span<const Move> moves, const MachineProfile& profile)
{
    return estimate_time(moves, profile.max_accel);
}

double quantize_position(double v)
{
    const double q = std::round(v * 1000.) / 1000.;
    return q == 0. ? 0. : q;
}

double quantize_extrusion(double e)
{
    const double q = std::round(e * 100000.) / 100000.;
    return q == 0. ? 0. : q;
}

double quantize_feedrate(double mm_per_s)
{
    return std::max(1., std::round(mm_per_s * 60.)) / 60.;
}

namespace {

Vec3 quantized(Vec3 p) { return { quantize_position(p.x), quantize_position(p.y), quantize_position(p.z) }; }

} // namespace

LayerMoves plan_layer_moves(std::span<const ToolPath> ordered, int layer_index, double z_top, double thickness,
                            const MachineProfile& profile, Vec3& position, const PlanOptions& options)
{
    LayerMoves out;
    out.layer_index = layer_index;
    out.z           = quantize_position(z_top);
    const bool retract = options.retraction_enabled;

    auto push = [&](Vec3 to, double feed, double e, PathRole role) {
        out.moves.push_back(Move::make(position, to, quantize_feedrate(feed), e, role, retract));
        position = to;
    };

    for (const ToolPath& path : ordered) {
        if (path.points.size() < 2)
            continue;
        std::vector<Vec3> pts;
        for (Vec2 p : path.points)
            pts.push_back(quantized({ p.x, p.y, z_top }));
        if (path.closed)
            pts.push_back(pts.front());

        if (!path.extrudes()) {
            const Vec3   to      = pts.back();
            const bool   do_retr = retract && distance(position, to) >= options.min_retract_travel;
            const double rl      = quantize_extrusion(profile.retraction_length);
            if (do_retr)
                push(position, profile.retraction_speed, -rl, PathRole::travel);
            push(to, profile.max_travel_speed, 0., PathRole::travel);
            if (do_retr)
                push(position, profile.retraction_speed, rl, PathRole::travel);
            continue;
        }

        // Reach the path start (and the layer height) without extruding.
        if (!(position == pts.front()))
            push(pts.front(), profile.max_travel_speed, 0., PathRole::travel);
        const double feed = limit_feedrate(path, thickness, profile);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const double len = distance(position, pts[i]);
            if (len <= 0.)
                continue;
            push(pts[i], feed, quantize_extrusion(compute_extrusion(len, path.width, thickness, profile.filament_diameter)),
                 path.role);
        }
    }
    return out;
}

double total_extrusion(std::span<const LayerMoves> layers)
{
    double e = 0.;
    for (const LayerMoves& l : layers)
        for (const Move& m : l.moves)
            e += m.extrusion_length;
    return e;
}

} // namespace flexslice
