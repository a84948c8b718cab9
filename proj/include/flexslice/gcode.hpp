#pragma once

#include "flexslice/kinematics.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flexslice {

// Klipper sets acceleration with SET_VELOCITY_LIMIT; generic firmware uses M204.
enum class AccelCommand
{
    klipper,
    m204,
};

struct EmitOptions
{
    bool         retraction_enabled = false;
    // Allow coordinates outside the build volume.
    bool         override_build_volume = false;
    AccelCommand accel_command         = AccelCommand::klipper;
    // Injected verbatim as ";GENERATED:<value>" when set; off by default so
    // output stays byte-identical across runs.
    std::optional<std::string> timestamp;
};

struct GcodeProgram
{
    std::vector<std::string>           lines;
    std::map<std::string, std::string> metadata; // TIME, FILAMENT, LAYERS

    // LF-terminated text.
    std::string text() const;
};

// Relative-extrusion program: header, one G0/G1 per move with modal fields,
// ";LAYER:<i>" markers, footer. Throws GeometryError when a move leaves the
// build volume (unless overridden) and ConfigError when a negative extrusion
// appears with retraction disabled.
GcodeProgram emit_gcode(std::span<const LayerMoves> layers, const MachineProfile& profile,
                        const EmitOptions& options = {});

struct ParsedGcode
{
    std::vector<Move>                  moves;
    std::map<std::string, std::string> metadata;
    // Index into `moves` where each ";LAYER:" section begins.
    std::vector<std::size_t>           layer_starts;
    std::optional<double>              acceleration;
    int                                unknown_commands = 0;
    std::vector<std::string>           warnings;
};

// Supported subset: G0/G1, G90, M82/M83, G92 E, comments, and the emitter's
// own header/footer commands. Unknown commands are counted and skipped.
// Throws ParseError on a malformed coordinate or on G91.
ParsedGcode parse_gcode(std::string_view text);

} // namespace flexslice
