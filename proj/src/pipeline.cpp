#include "flexslice/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace flexslice {

DrcConfig effective_drc_config(const JobConfig& job)
{
    DrcConfig d            = job.drc;
    d.layer_height         = job.layer_height;
    d.support_grid_spacing = job.supports.grid_spacing;
    return d;
}

SliceJob analyze(const TriangleMesh& mesh, const JobConfig& job)
{
    job.validate();
    SliceJob sj;
    std::tie(sj.mesh, sj.transform) = orient_for_print(mesh, job.mode);
    sj.slices    = slice_mesh(sj.mesh, job.layer_height, job.first_layer_height, job.threads);
    sj.bridges   = detect_all_bridges(sj.slices);
    const DrcConfig drc = effective_drc_config(job);
    sj.overhangs = detect_overhangs(sj.mesh, drc.overhang, job.mode);
    if (job.supports.enabled && !sj.overhangs.empty()) {
        AeroSupportParams p;
        p.grid_spacing    = job.supports.grid_spacing;
        p.column_width    = job.supports.column_width;
        p.extrusion_width = job.extrusion_width;
        p.layer_height    = job.layer_height;
        sj.columns        = generate_aero_supports(sj.overhangs, p);
    }
    sj.report = run_drc(sj.mesh, sj.slices, sj.bridges, sj.columns, drc, job.mode);
    return sj;
}

namespace {

std::vector<Contour> bridge_area(const std::vector<BridgeRegion>& bridges)
{
    std::vector<Contour> area;
    for (const BridgeRegion& b : bridges)
        area = area.empty() ? b.contours : region_union(area, b.contours);
    return area;
}

// Fraction of a path's length (sampled every half millimetre) inside `area`.
double fraction_inside(const ToolPath& path, std::span<const Contour> area)
{
    std::size_t inside = 0, total = 0;
    const std::size_t n = path.points.size();
    const std::size_t segs = path.closed ? n : n - 1;
    for (std::size_t i = 0; i < segs; ++i) {
        const Vec2 a = path.points[i], b = path.points[(i + 1) % n];
        const int  steps = std::max(1, static_cast<int>(std::ceil(distance(a, b) / 0.5)));
        for (int k = 0; k < steps; ++k) {
            const double t = (k + 0.5) / steps;
            ++total;
            if (point_in_region(area, a + (b - a) * t))
                ++inside;
        }
    }
    return total ? static_cast<double>(inside) / static_cast<double>(total) : 0.;
}

} // namespace

std::vector<ToolPath> layer_toolpaths(const SliceJob& sj, std::size_t layer, const JobConfig& job)
{
    const LayerSlice& slice = sj.slices[layer];
    const double      w     = job.extrusion_width;
    const int         index = slice.index;

    std::vector<ToolPath> paths = generate_perimeters(slice, job.perimeters, w);

    const std::vector<Contour> bridged = layer < sj.bridges.size() ? bridge_area(sj.bridges[layer])
                                                                    : std::vector<Contour> {};
    if (!bridged.empty())
        for (ToolPath& p : paths)
            if (fraction_inside(p, bridged) > 0.5)
                p.role = PathRole::bridge;

    const double angle  = index % 2 == 0 ? 0. : 90.;
    const auto   islands = split_islands(slice.contours);
    for (std::size_t isl = 0; isl < islands.size(); ++isl) {
        const auto inner = infill_area(islands[isl], job.perimeters, w);
        if (inner.empty())
            continue;
        std::vector<ToolPath> fill;
        auto regular = inner;
        if (!bridged.empty()) {
            regular = region_difference(inner, bridged);
            // Bridge lines run across the gap, along the short side of each span.
            for (const BridgeRegion& b : sj.bridges[layer]) {
                const auto part = region_intersection(inner, b.contours);
                if (part.empty())
                    continue;
                const double across = (b.long_angle + std::numbers::pi / 2.) * 180. / std::numbers::pi;
                auto lines = generate_infill(part, 1.0, across, w, index, PathRole::bridge);
                fill.insert(fill.end(), lines.begin(), lines.end());
            }
        }
        if (!regular.empty()) {
            auto lines = generate_infill(regular, job.infill_density, angle, w, index);
            fill.insert(fill.end(), lines.begin(), lines.end());
        }
        for (ToolPath& p : fill)
            p.island = static_cast<int>(isl);
        paths.insert(paths.end(), fill.begin(), fill.end());
    }

    if (!sj.columns.empty()) {
        auto sup = support_layer_paths(sj.columns, index, slice.top_z, w, static_cast<int>(islands.size()));
        paths.insert(paths.end(), sup.begin(), sup.end());
    }
    return paths;
}

void plan_toolpaths(SliceJob& sj, const JobConfig& job)
{
    const std::size_t n = sj.slices.size();
    std::vector<std::vector<ToolPath>> raw(n);
    unsigned threads = job.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : job.threads;
    threads          = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            raw[i] = layer_toolpaths(sj, i, job);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < n; i += threads)
                    raw[i] = layer_toolpaths(sj, i, job);
            });
    }

    // Ordering chains each layer from where the previous one ended.
    sj.paths.assign(n, {});
    sj.moves.clear();
    Vec3        position { 0., 0., 0. };
    PlanOptions opts;
    opts.retraction_enabled = job.retraction_enabled;
    for (std::size_t i = 0; i < n; ++i) {
        sj.paths[i] = order_paths(std::move(raw[i]), position.xy());
        sj.moves.push_back(plan_layer_moves(sj.paths[i], sj.slices[i].index, sj.slices[i].top_z,
                                            sj.slices[i].thickness, job.machine, position, opts));
    }
}

GcodeProgram emit_job(const SliceJob& sj, const JobConfig& job)
{
    EmitOptions opts;
    opts.retraction_enabled    = job.retraction_enabled;
    opts.override_build_volume = job.drc_override;
    opts.accel_command         = job.accel_command;
    return emit_gcode(sj.moves, job.machine, opts);
}

} // namespace flexslice
