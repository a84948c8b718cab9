#pragma once

#include "flexslice/pathgen.hpp"
#include "flexslice/supports.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flexslice {

enum class RuleId
{
    R1_BUILD_VOLUME,
    R2_MIN_WALL,
    R3_BRIDGE_SPAN,
    R4_CHANNEL_BLOCKAGE,
    R5_UNSUPPORTED,
    R6_TALL_MEMBRANE,
};

enum class Severity
{
    error,
    warning,
};

std::string_view to_string(RuleId rule);
std::string_view to_string(Severity severity);

struct Location
{
    double                x = 0.;
    double                y = 0.;
    std::optional<double> z;
};

struct Violation
{
    RuleId             rule     = RuleId::R1_BUILD_VOLUME;
    Severity           severity = Severity::error;
    std::optional<int> layer_index;
    Location           location;
    std::string        message;
};

// Thresholds other than the build volume are engineering defaults, not
// measured limits; treat them as tunable.
struct DrcConfig
{
    Vec3               build_volume { 120., 120., 120. };
    double             min_wall                 = 0.8;
    double             max_bridge_standard      = 10.;
    double             max_bridge_upside_down   = 40.;
    double             min_channel              = 1.0;
    double             max_wall_aspect_standard = 50.;
    OverhangThresholds overhang;
    // Coverage radius for R5 is support_grid_spacing * sqrt(2) / 2.
    double             support_grid_spacing = 3.0;
    // Overhang points closer to the bed than two layers count as bed-supported.
    double             layer_height         = 0.2;

    // Throws ConfigError.
    void validate() const;
};

struct DrcReport
{
    std::vector<Violation> violations;

    bool        has_errors() const;
    std::size_t count(RuleId rule) const;
    std::size_t count(Severity severity) const;

    // One line per violation: `RULE severity layer=<i> at=(x,y) msg=...`.
    std::string to_text() const;
    // JSON Lines, one object per violation.
    std::string to_structured() const;
};

// Evaluates R1..R6. `bridges` is either empty or holds one entry per slice.
// Throws GeometryError when the slices were not produced from `mesh`.
DrcReport run_drc(const TriangleMesh& mesh, std::span<const LayerSlice> slices,
                  std::span<const std::vector<BridgeRegion>> bridges, std::span<const AeroColumn> supports,
                  const DrcConfig& config, Orientation mode);

// Individual rule helpers, exposed for testing.
// Thickest disc that fits in the island, as a diameter (bisection on erosion).
double wall_thickness(std::span<const Contour> island, double precision = 0.002);

} // namespace flexslice
