#include "flexslice/drc.hpp"

#include "flexslice/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace flexslice {

std::string_view to_string(RuleId rule)
{
    switch (rule) {
    case RuleId::R1_BUILD_VOLUME: return "R1_BUILD_VOLUME";
    case RuleId::R2_MIN_WALL: return "R2_MIN_WALL";
    case RuleId::R3_BRIDGE_SPAN: return "R3_BRIDGE_SPAN";
    case RuleId::R4_CHANNEL_BLOCKAGE: return "R4_CHANNEL_BLOCKAGE";
    case RuleId::R5_UNSUPPORTED: return "R5_UNSUPPORTED";
    case RuleId::R6_TALL_MEMBRANE: return "R6_TALL_MEMBRANE";
    }
    return "UNKNOWN";
}

std::string_view to_string(Severity severity)
{
    return severity == Severity::error ? "error" : "warning";
}

void DrcConfig::validate() const
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0.) || !std::isfinite(v))
            throw ConfigError(std::string("drc: ") + name + " must be positive");
    };
    positive(build_volume.x, "build_volume_x");
    positive(build_volume.y, "build_volume_y");
    positive(build_volume.z, "build_volume_z");
    positive(min_wall, "min_wall");
    positive(max_bridge_standard, "max_bridge_standard");
    positive(max_bridge_upside_down, "max_bridge_upside_down");
    positive(min_channel, "min_channel");
    positive(max_wall_aspect_standard, "max_wall_aspect_standard");
    positive(support_grid_spacing, "support_grid_spacing");
    positive(layer_height, "layer_height");
    if (max_bridge_upside_down < max_bridge_standard)
        throw ConfigError("drc: max_bridge_upside_down must be >= max_bridge_standard");
    for (double a : { overhang.standard_deg, overhang.upside_down_deg })
        if (!(a > 0. && a < 90.))
            throw ConfigError("drc: overhang thresholds must lie in (0, 90) degrees");
}

bool DrcReport::has_errors() const { return count(Severity::error) > 0; }

std::size_t DrcReport::count(RuleId rule) const
{
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [rule](const Violation& v) { return v.rule == rule; }));
}

std::size_t DrcReport::count(Severity severity) const
{
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [severity](const Violation& v) { return v.severity == severity; }));
}

namespace {

std::string fmt3(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace

std::string DrcReport::to_text() const
{
    std::string out;
    for (const Violation& v : violations) {
        out += to_string(v.rule);
        out += ' ';
        out += to_string(v.severity);
        out += " layer=" + (v.layer_index ? std::to_string(*v.layer_index) : std::string("-"));
        out += " at=(" + fmt3(v.location.x) + "," + fmt3(v.location.y);
        if (v.location.z)
            out += "," + fmt3(*v.location.z);
        out += ") msg=" + v.message + "\n";
    }
    return out;
}

std::string DrcReport::to_structured() const
{
    std::string out;
    for (const Violation& v : violations) {
        nlohmann::json rec;
        rec["rule"]     = std::string(to_string(v.rule));
        rec["severity"] = std::string(to_string(v.severity));
        rec["layer"]    = v.layer_index ? nlohmann::json(*v.layer_index) : nlohmann::json(nullptr);
        rec["at"]       = v.location.z ? nlohmann::json::array({ v.location.x, v.location.y, *v.location.z })
                                       : nlohmann::json::array({ v.location.x, v.location.y });
        rec["message"]  = v.message;
        out += rec.dump();
        out += '\n';
    }
    return out;
}

double wall_thickness(std::span<const Contour> island, double precision)
{
    if (island.empty())
        return 0.;
    std::vector<Vec2> pts;
    for (const Contour& c : island)
        if (!c.is_hole)
            pts.insert(pts.end(), c.points.begin(), c.points.end());
    double lo = 0., hi = 0.5 * min_feret_diameter(pts);
    if (!offset_contours(island, -hi).empty())
        return 2. * hi;
    while (hi - lo > 0.5 * precision) {
        const double mid = 0.5 * (lo + hi);
        if (offset_contours(island, -mid).empty())
            hi = mid;
        else
            lo = mid;
    }
    return lo + hi;
}

namespace {

bool boxes_overlap(const BoundingBox2& a, const BoundingBox2& b)
{
    return a.min.x <= b.max.x && b.min.x <= a.max.x && a.min.y <= b.max.y && b.min.y <= a.max.y;
}

Location centre_of(const BoundingBox2& bb)
{
    return { 0.5 * (bb.min.x + bb.max.x), 0.5 * (bb.min.y + bb.max.y), std::nullopt };
}

void check_provenance(const TriangleMesh& mesh, std::span<const LayerSlice> slices,
                      std::span<const std::vector<BridgeRegion>> bridges)
{
    if (!bridges.empty() && bridges.size() != slices.size())
        throw GeometryError("drc: bridge list does not match the slice count");
    if (slices.empty())
        return;
    const BoundingBox3 bb  = mesh.bounding_box();
    constexpr double   tol = 10 * kSnapTolerance;
    for (const LayerSlice& s : slices) {
        if (s.z < bb.min.z - tol || s.z > bb.max.z + tol)
            throw GeometryError("drc: slice " + std::to_string(s.index) + " at z=" + fmt3(s.z) +
                                " lies outside the mesh height range");
        const BoundingBox2 sb = bounding_box(s.contours);
        if (sb.defined() && (sb.min.x < bb.min.x - tol || sb.min.y < bb.min.y - tol || sb.max.x > bb.max.x + tol ||
                             sb.max.y > bb.max.y + tol))
            throw GeometryError("drc: slice " + std::to_string(s.index) + " extends beyond the mesh footprint");
    }
}

void rule_build_volume(const TriangleMesh& mesh, const DrcConfig& cfg, std::vector<Violation>& out)
{
    const BoundingBox3 bb   = mesh.bounding_box();
    const Vec3         size = bb.size();
    const Vec3&        bv   = cfg.build_volume;
    constexpr double   tol  = 1e-9;
    if (size.x > bv.x + tol || size.y > bv.y + tol || size.z > bv.z + tol)
        out.push_back({ RuleId::R1_BUILD_VOLUME, Severity::error, std::nullopt, { bb.max.x, bb.max.y, bb.max.z },
                        "part extent " + fmt3(size.x) + " x " + fmt3(size.y) + " x " + fmt3(size.z) +
                            " mm exceeds build volume " + fmt3(bv.x) + " x " + fmt3(bv.y) + " x " + fmt3(bv.z) +
                            " mm" });
}

void rule_min_wall(std::span<const LayerSlice> slices, const DrcConfig& cfg, std::vector<Violation>& out)
{
    const double              half = 0.5 * cfg.min_wall;
    const double              min_area = 0.5 * cfg.min_wall * cfg.min_wall;
    std::vector<BoundingBox2> previous;
    for (const LayerSlice& s : slices) {
        std::vector<BoundingBox2> current;
        if (!s.contours.empty()) {
            const auto opened = opening(s.contours, half);
            const auto thin   = region_difference(s.contours, opened);
            for (const auto& island : split_islands(thin)) {
                const double area = region_area(island);
                if (area < min_area)
                    continue;
                const BoundingBox2 bb = bounding_box(island);
                current.push_back(bb);
                // One warning per vertical run of the same thin feature.
                if (std::any_of(previous.begin(), previous.end(), [&](const auto& p) { return boxes_overlap(p, bb); }))
                    continue;
                out.push_back({ RuleId::R2_MIN_WALL, Severity::warning, s.index, centre_of(bb),
                                "wall thinner than " + fmt3(cfg.min_wall) + " mm (" + fmt3(area) +
                                    " mm2 in this layer); airtightness is not guaranteed" });
            }
        }
        previous = std::move(current);
    }
}

void rule_bridges(std::span<const LayerSlice> slices, std::span<const std::vector<BridgeRegion>> bridges,
                  const DrcConfig& cfg, Orientation mode, std::vector<Violation>& out)
{
    const double limit = mode == Orientation::upside_down ? cfg.max_bridge_upside_down : cfg.max_bridge_standard;
    for (std::size_t i = 0; i < bridges.size(); ++i)
        for (const BridgeRegion& b : bridges[i])
            if (b.max_span > limit + 1e-9)
                out.push_back({ RuleId::R3_BRIDGE_SPAN, Severity::error, slices[i].index, { b.center.x, b.center.y, {} },
                                "unsupported span " + fmt3(b.max_span) + " mm exceeds " + fmt3(limit) + " mm (" +
                                    std::string(to_string(mode)) + " mode)" });
}

void rule_channels(std::span<const LayerSlice> slices, const DrcConfig& cfg, std::vector<Violation>& out)
{
    std::vector<BoundingBox2> previous;
    for (const LayerSlice& s : slices) {
        std::vector<BoundingBox2> current;
        for (const Contour& c : s.contours) {
            if (!c.is_hole)
                continue;
            const double feret = min_feret_diameter(c.points);
            if (feret >= cfg.min_channel)
                continue;
            const BoundingBox2 bb = c.bounding_box();
            current.push_back(bb);
            if (std::any_of(previous.begin(), previous.end(), [&](const auto& p) { return boxes_overlap(p, bb); }))
                continue;
            out.push_back({ RuleId::R4_CHANNEL_BLOCKAGE, Severity::warning, s.index, centre_of(bb),
                            "channel width " + fmt3(feret) + " mm below " + fmt3(cfg.min_channel) +
                                " mm; ooze may block it" });
        }
        previous = std::move(current);
    }
}

void rule_unsupported(const TriangleMesh& mesh, std::span<const AeroColumn> supports, const DrcConfig& cfg,
                      Orientation mode, std::vector<Violation>& out)
{
    const double radius = cfg.support_grid_spacing * std::sqrt(2.) / 2. + 1e-6;
    const double floor  = std::min(0., mesh.bounding_box().min.z) + 2. * cfg.layer_height;
    for (const FacetRegion& region : detect_overhangs(mesh, cfg.overhang, mode)) {
        std::vector<Vec3> samples;
        for (const Vec3& p : sample_region(region, 0.5 * cfg.support_grid_spacing))
            if (p.z >= floor)
                samples.push_back(p);
        if (samples.empty())
            continue;
        const auto  covered = coverage_mask(samples, supports, radius);
        std::size_t missing = 0, first = samples.size();
        for (std::size_t k = 0; k < samples.size(); ++k)
            if (!covered[k]) {
                ++missing;
                first = std::min(first, k);
            }
        if (missing == 0)
            continue;
        const Vec3& p = samples[first];
        out.push_back({ RuleId::R5_UNSUPPORTED, Severity::error, std::nullopt, { p.x, p.y, p.z },
                        "overhang of " + fmt3(region.area()) + " mm2 has " + std::to_string(missing) + " of " +
                            std::to_string(samples.size()) + " sample points without a support column" });
    }
}

void rule_tall_walls(std::span<const LayerSlice> slices, const DrcConfig& cfg, std::vector<Violation>& out)
{
    struct Wall
    {
        std::vector<Contour> contours;
        BoundingBox2         bb;
        double               thickness = 0.;
        double               height    = 0.; // of the run of similar-thickness islands ending here
        std::size_t          run       = 0;
    };
    struct Run
    {
        int          first_layer = 0;
        BoundingBox2 bb;
        double       aspect    = 0.;
        double       height    = 0.;
        double       thickness = 0.;
    };
    constexpr double  kSimilar = 1.25;
    std::vector<Run>  runs;
    std::vector<Wall> below;
    for (const LayerSlice& s : slices) {
        std::vector<Wall> current;
        for (auto& island : split_islands(s.contours)) {
            Wall w;
            w.bb        = bounding_box(island);
            w.thickness = wall_thickness(island);
            w.contours  = std::move(island);
            if (!(w.thickness > 0.))
                continue;
            const Wall* base = nullptr;
            for (const Wall& b : below) {
                if (!boxes_overlap(b.bb, w.bb))
                    continue;
                const double ratio = b.thickness / w.thickness;
                if (ratio > kSimilar || ratio < 1. / kSimilar)
                    continue;
                if (region_intersection(b.contours, w.contours).empty())
                    continue;
                if (!base || b.height > base->height)
                    base = &b;
            }
            w.height = s.thickness + (base ? base->height : 0.);
            if (base) {
                w.run = base->run;
            } else {
                w.run = runs.size();
                runs.push_back({ s.index, w.bb, 0., 0., 0. });
            }
            Run& r = runs[w.run];
            if (w.height / w.thickness > r.aspect) {
                r.aspect    = w.height / w.thickness;
                r.height    = w.height;
                r.thickness = w.thickness;
            }
            r.bb.merge(w.bb.min);
            r.bb.merge(w.bb.max);
            current.push_back(std::move(w));
        }
        below = std::move(current);
    }
    for (const Run& r : runs)
        if (r.aspect > cfg.max_wall_aspect_standard)
            out.push_back({ RuleId::R6_TALL_MEMBRANE, Severity::warning, r.first_layer, centre_of(r.bb),
                            "wall " + fmt3(r.thickness) + " mm thick and " + fmt3(r.height) + " mm tall (aspect " +
                                fmt3(r.aspect) + " > " + fmt3(cfg.max_wall_aspect_standard) +
                                "); print upside down to load it in tension" });
}

} // namespace

DrcReport run_drc(const TriangleMesh& mesh, std::span<const LayerSlice> slices,
                  std::span<const std::vector<BridgeRegion>> bridges, std::span<const AeroColumn> supports,
                  const DrcConfig& config, Orientation mode)
{
    config.validate();
    if (mesh.empty())
        throw GeometryError("drc: empty mesh");
    check_provenance(mesh, slices, bridges);

    std::vector<Violation> v;
    rule_build_volume(mesh, config, v);
    rule_unsupported(mesh, supports, config, mode, v);
    rule_min_wall(slices, config, v);
    rule_bridges(slices, bridges, config, mode, v);
    rule_channels(slices, config, v);
    if (mode == Orientation::standard)
        rule_tall_walls(slices, config, v);

    // Mesh-level findings first, then layer order.
    std::stable_sort(v.begin(), v.end(), [](const Violation& a, const Violation& b) {
        const int la = a.layer_index.value_or(-1), lb = b.layer_index.value_or(-1);
        if (la != lb)
            return la < lb;
        return static_cast<int>(a.rule) < static_cast<int>(b.rule);
    });
    return DrcReport { std::move(v) };
}

} // namespace flexslice
