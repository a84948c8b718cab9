#pragma once

#include "flexslice/pathgen.hpp"

#include <span>
#include <vector>

namespace flexslice {

// Per-role speed ceilings in mm/s.
struct RoleSpeeds
{
    double outer_perimeter = 100.;
    double inner_perimeter = 150.;
    double infill          = 200.;
    double bridge          = 40.;
    double support         = 120.;
};

struct MachineProfile
{
    double     filament_diameter   = 2.85;
    // Filament the flow cap was calibrated for. Buckling load scales with d^4.
    double     reference_diameter  = 1.75;
    double     nozzle_diameter     = 0.4;
    double     max_accel           = 10000.; // mm/s^2
    double     max_travel_speed    = 500.;   // mm/s
    double     max_volumetric_flow = 12.;    // mm^3/s, provisional calibration value
    RoleSpeeds speeds;
    Vec3       build_volume { 120., 120., 120. };
    double     bed_temperature    = 0.; // 0 leaves the heater off
    double     nozzle_temperature = 230.;
    double     fan_fraction       = 1.;
    double     retraction_length  = 0.8; // mm of filament, only used when retraction is enabled
    double     retraction_speed   = 40.; // mm/s

    // Throws ConfigError on a non-physical value.
    void   validate() const;
    double speed_cap(PathRole role) const;
    double effective_flow() const;
};

// (d / d_ref)^4, the critical buckling load ratio of two filament columns.
// Throws ConfigError on non-positive input.
double buckling_headroom(double d, double d_ref);

// Filament length (mm) for a rectangular bead of the given size.
double compute_extrusion(double path_length, double width, double height, double filament_d);

double filament_area(double filament_d);

// Feedrate (mm/s): min(role cap, effective flow / (width * layer_height)),
// or the travel speed for travel paths.
double limit_feedrate(const ToolPath& path, double layer_height, const MachineProfile& profile);

struct Move
{
    Vec3     from;
    Vec3     to;
    double   feedrate         = 0.; // mm/s
    double   extrusion_length = 0.; // mm of filament, 0 for travel
    PathRole role             = PathRole::travel;

    // Throws ConfigError for negative extrusion unless retraction is enabled,
    // or for a non-positive feedrate.
    static Move make(Vec3 from, Vec3 to, double feedrate, double extrusion_length, PathRole role,
                     bool retraction_enabled = false);

    double length() const { return distance(from, to); }
};

// Rest-to-rest trapezoidal (or triangular) profile for one move.
double move_time(const Move& move, double accel);
double estimate_time(std::span<const Move> moves, double accel);
double estimate_time(std::span<const Move> moves, const MachineProfile& profile);

// Output resolution of the emitter: 1 um positions, 1e-5 mm filament,
// integer mm/min feedrates.
double quantize_position(double v);
double quantize_extrusion(double e);
double quantize_feedrate(double mm_per_s);

struct LayerMoves
{
    int               layer_index = 0;
    double            z           = 0.; // nozzle height
    std::vector<Move> moves;
};

struct PlanOptions
{
    bool retraction_enabled = false;
    // Travel moves shorter than this never retract.
    double min_retract_travel = 1.0;
};

// Lowers ordered tool paths into moves at the emitter's resolution, so that
// emitted and re-parsed programs estimate identically. `position` is the
// nozzle position before the layer and is updated.
LayerMoves plan_layer_moves(std::span<const ToolPath> ordered, int layer_index, double z_top, double thickness,
                            const MachineProfile& profile, Vec3& position, const PlanOptions& options = {});

double total_extrusion(std::span<const LayerMoves> layers);

} // namespace flexslice
