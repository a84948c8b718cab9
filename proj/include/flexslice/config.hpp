#pragma once

#include "flexslice/drc.hpp"
#include "flexslice/gcode.hpp"
#include "flexslice/kinematics.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace flexslice {

struct SupportSettings
{
    bool   enabled      = true;
    double grid_spacing = 3.0;
    double column_width = 0.8;
};

struct JobConfig
{
    std::filesystem::path input;
    std::filesystem::path output;
    Orientation           mode               = Orientation::standard;
    double                layer_height       = 0.2;
    double                first_layer_height = 0.2;
    int                   perimeters         = 2;
    double                infill_density     = 0.15;
    double                extrusion_width    = 0.4;
    SupportSettings       supports;
    DrcConfig             drc;
    MachineProfile        machine;
    bool                  retraction_enabled = false;
    bool                  drc_override       = false;
    AccelCommand          accel_command      = AccelCommand::klipper;
    unsigned              threads            = 1;

    // Throws ConfigError.
    void validate() const;
};

// Every key accepted by config files and --set, in documentation order.
const std::vector<std::string>& setting_keys();

// Throws ConfigError for an unknown key or a malformed value.
void        apply_setting(JobConfig& job, std::string_view key, std::string_view value);
std::string get_setting(const JobConfig& job, std::string_view key);

using SettingList = std::vector<std::pair<std::string, std::string>>;

// `key = value` lines with `#` comments. Lines before the first
// `profile = <name>` are global; a profile section runs until the next one.
// Returns the global entries followed by those of the selected profile. The
// profile is `profile_name` if given, else the global `active_profile` key.
// Throws ConfigError on a malformed line or an unknown profile.
SettingList parse_config_text(std::string_view text, const std::optional<std::string>& profile_name = {});

// Reads and applies a config file. Throws ParseError if it cannot be read.
void load_config_file(JobConfig& job, const std::filesystem::path& path,
                      const std::optional<std::string>& profile_name = {});

} // namespace flexslice
