#include "flexslice/config.hpp"

#include "flexslice/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace flexslice {

namespace {

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b  = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

double to_double(std::string_view key, std::string_view text)
{
    text = trim(text);
    double v  = 0.;
    auto   rc = std::from_chars(text.data(), text.data() + text.size(), v);
    if (rc.ec != std::errc() || rc.ptr != text.data() + text.size() || !std::isfinite(v))
        throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
    return v;
}

int to_int(std::string_view key, std::string_view text)
{
    text  = trim(text);
    int v = 0;
    auto rc = std::from_chars(text.data(), text.data() + text.size(), v);
    if (rc.ec != std::errc() || rc.ptr != text.data() + text.size())
        throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(text) + "'");
    return v;
}

bool to_bool(std::string_view key, std::string_view text)
{
    text = trim(text);
    if (text == "1" || text == "true" || text == "yes" || text == "on")
        return true;
    if (text == "0" || text == "false" || text == "no" || text == "off")
        return false;
    throw ConfigError(std::string(key) + ": expected a boolean, got '" + std::string(text) + "'");
}

// Shortest text that reads back to the same double.
std::string num(double v)
{
    char buf[64];
    auto rc = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, rc.ptr);
}

struct Setting
{
    std::string                                              key;
    std::function<void(JobConfig&, std::string_view)>        set;
    std::function<std::string(const JobConfig&)>             get;
};

Setting real(std::string key, double JobConfig::*field)
{
    return { key, [key, field](JobConfig& j, std::string_view v) { j.*field = to_double(key, v); },
             [field](const JobConfig& j) { return num(j.*field); } };
}

template <class Accessor>
Setting real_at(std::string key, Accessor at)
{
    return { key, [key, at](JobConfig& j, std::string_view v) { at(j) = to_double(key, v); },
             [at](const JobConfig& j) { return num(at(const_cast<JobConfig&>(j))); } };
}

Setting flag(std::string key, bool JobConfig::*field)
{
    return { key, [key, field](JobConfig& j, std::string_view v) { j.*field = to_bool(key, v); },
             [field](const JobConfig& j) { return std::string(j.*field ? "true" : "false"); } };
}

// Both the DRC and the emitter check the build volume; keep them in sync.
Setting build_axis(std::string key, double Vec3::*axis)
{
    return { key,
             [key, axis](JobConfig& j, std::string_view v) {
                 const double d = to_double(key, v);
                 j.drc.build_volume.*axis     = d;
                 j.machine.build_volume.*axis = d;
             },
             [axis](const JobConfig& j) { return num(j.machine.build_volume.*axis); } };
}

const std::vector<Setting>& table()
{
    static const std::vector<Setting> t = [] {
        std::vector<Setting> s;
        s.push_back({ "input", [](JobConfig& j, std::string_view v) { j.input = std::string(trim(v)); },
                      [](const JobConfig& j) { return j.input.string(); } });
        s.push_back({ "output", [](JobConfig& j, std::string_view v) { j.output = std::string(trim(v)); },
                      [](const JobConfig& j) { return j.output.string(); } });
        s.push_back({ "mode", [](JobConfig& j, std::string_view v) { j.mode = parse_orientation(trim(v)); },
                      [](const JobConfig& j) { return std::string(to_string(j.mode)); } });
        s.push_back(real("layer_height", &JobConfig::layer_height));
        s.push_back(real("first_layer_height", &JobConfig::first_layer_height));
        s.push_back({ "perimeters", [](JobConfig& j, std::string_view v) { j.perimeters = to_int("perimeters", v); },
                      [](const JobConfig& j) { return std::to_string(j.perimeters); } });
        s.push_back(real("infill_density", &JobConfig::infill_density));
        s.push_back(real("extrusion_width", &JobConfig::extrusion_width));
        s.push_back({ "supports", [](JobConfig& j, std::string_view v) { j.supports.enabled = to_bool("supports", v); },
                      [](const JobConfig& j) { return std::string(j.supports.enabled ? "true" : "false"); } });
        s.push_back(real_at("support_grid_spacing", [](JobConfig& j) -> double& { return j.supports.grid_spacing; }));
        s.push_back(real_at("support_column_width", [](JobConfig& j) -> double& { return j.supports.column_width; }));
        s.push_back(flag("retraction_enabled", &JobConfig::retraction_enabled));
        s.push_back(flag("drc_override", &JobConfig::drc_override));
        s.push_back({ "accel_command",
                      [](JobConfig& j, std::string_view v) {
                          v = trim(v);
                          if (v == "klipper")
                              j.accel_command = AccelCommand::klipper;
                          else if (v == "m204")
                              j.accel_command = AccelCommand::m204;
                          else
                              throw ConfigError("accel_command: expected klipper|m204, got '" + std::string(v) + "'");
                      },
                      [](const JobConfig& j) {
                          return std::string(j.accel_command == AccelCommand::klipper ? "klipper" : "m204");
                      } });
        s.push_back({ "threads",
                      [](JobConfig& j, std::string_view v) {
                          const int n = to_int("threads", v);
                          if (n < 0)
                              throw ConfigError("threads: must not be negative");
                          j.threads = static_cast<unsigned>(n);
                      },
                      [](const JobConfig& j) { return std::to_string(j.threads); } });

        s.push_back(build_axis("build_volume_x", &Vec3::x));
        s.push_back(build_axis("build_volume_y", &Vec3::y));
        s.push_back(build_axis("build_volume_z", &Vec3::z));
        s.push_back(real_at("min_wall", [](JobConfig& j) -> double& { return j.drc.min_wall; }));
        s.push_back(real_at("max_bridge_standard", [](JobConfig& j) -> double& { return j.drc.max_bridge_standard; }));
        s.push_back(
            real_at("max_bridge_upside_down", [](JobConfig& j) -> double& { return j.drc.max_bridge_upside_down; }));
        s.push_back(real_at("min_channel", [](JobConfig& j) -> double& { return j.drc.min_channel; }));
        s.push_back(real_at("max_wall_aspect_standard",
                            [](JobConfig& j) -> double& { return j.drc.max_wall_aspect_standard; }));
        s.push_back(real_at("overhang_standard_deg", [](JobConfig& j) -> double& { return j.drc.overhang.standard_deg; }));
        s.push_back(
            real_at("overhang_upside_down_deg", [](JobConfig& j) -> double& { return j.drc.overhang.upside_down_deg; }));

        s.push_back(real_at("filament_diameter", [](JobConfig& j) -> double& { return j.machine.filament_diameter; }));
        s.push_back(real_at("reference_diameter", [](JobConfig& j) -> double& { return j.machine.reference_diameter; }));
        s.push_back(real_at("nozzle_diameter", [](JobConfig& j) -> double& { return j.machine.nozzle_diameter; }));
        s.push_back(real_at("max_accel", [](JobConfig& j) -> double& { return j.machine.max_accel; }));
        s.push_back(real_at("max_travel_speed", [](JobConfig& j) -> double& { return j.machine.max_travel_speed; }));
        s.push_back(real_at("max_volumetric_flow", [](JobConfig& j) -> double& { return j.machine.max_volumetric_flow; }));
        s.push_back(real_at("speed_outer_perimeter", [](JobConfig& j) -> double& { return j.machine.speeds.outer_perimeter; }));
        s.push_back(real_at("speed_inner_perimeter", [](JobConfig& j) -> double& { return j.machine.speeds.inner_perimeter; }));
        s.push_back(real_at("speed_infill", [](JobConfig& j) -> double& { return j.machine.speeds.infill; }));
        s.push_back(real_at("speed_bridge", [](JobConfig& j) -> double& { return j.machine.speeds.bridge; }));
        s.push_back(real_at("speed_support", [](JobConfig& j) -> double& { return j.machine.speeds.support; }));
        s.push_back(real_at("bed_temperature", [](JobConfig& j) -> double& { return j.machine.bed_temperature; }));
        s.push_back(real_at("nozzle_temperature", [](JobConfig& j) -> double& { return j.machine.nozzle_temperature; }));
        s.push_back(real_at("fan_fraction", [](JobConfig& j) -> double& { return j.machine.fan_fraction; }));
        s.push_back(real_at("retraction_length", [](JobConfig& j) -> double& { return j.machine.retraction_length; }));
        s.push_back(real_at("retraction_speed", [](JobConfig& j) -> double& { return j.machine.retraction_speed; }));
        return s;
    }();
    return t;
}

const Setting& find_setting(std::string_view key)
{
    for (const Setting& s : table())
        if (s.key == key)
            return s;
    throw ConfigError("unknown setting '" + std::string(key) + "'");
}

} // namespace

void JobConfig::validate() const
{
    if (layer_height < kMinLayerHeight || layer_height > kMaxLayerHeight)
        throw ConfigError("layer_height must lie in [0.04, 1] mm");
    if (first_layer_height < kMinLayerHeight || first_layer_height > kMaxLayerHeight)
        throw ConfigError("first_layer_height must lie in [0.04, 1] mm");
    if (perimeters < 1)
        throw ConfigError("perimeters must be at least 1");
    if (!(infill_density >= 0. && infill_density <= 1.))
        throw ConfigError("infill_density must lie in [0, 1]");
    if (!(extrusion_width > 0.))
        throw ConfigError("extrusion_width must be positive");
    if (extrusion_width < 0.5 * machine.nozzle_diameter || extrusion_width > 3. * machine.nozzle_diameter)
        throw ConfigError("extrusion_width must lie in [0.5, 3] x nozzle diameter");
    if (!(supports.grid_spacing > 0.) || !(supports.column_width > 0.))
        throw ConfigError("support spacing and column width must be positive");
    machine.validate();
    drc.validate();
}

const std::vector<std::string>& setting_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const Setting& s : table())
            k.push_back(s.key);
        return k;
    }();
    return keys;
}

void apply_setting(JobConfig& job, std::string_view key, std::string_view value)
{
    find_setting(trim(key)).set(job, value);
}

std::string get_setting(const JobConfig& job, std::string_view key)
{
    return find_setting(trim(key)).get(job);
}

SettingList parse_config_text(std::string_view text, const std::optional<std::string>& profile_name)
{
    SettingList                        global;
    std::vector<std::pair<std::string, SettingList>> profiles;
    std::istringstream                 in { std::string(text) };
    std::string                        line;
    int                                lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view l = line;
        if (auto hash = l.find('#'); hash != std::string_view::npos)
            l = l.substr(0, hash);
        l = trim(l);
        if (l.empty())
            continue;
        const auto eq = l.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key { trim(l.substr(0, eq)) };
        std::string value { trim(l.substr(eq + 1)) };
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (key == "profile") {
            if (value.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty profile name");
            profiles.emplace_back(value, SettingList {});
            continue;
        }
        if (key != "active_profile") {
            try {
                find_setting(key);
            } catch (const ConfigError& e) {
                throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
            }
        }
        (profiles.empty() ? global : profiles.back().second).emplace_back(std::move(key), std::move(value));
    }

    std::optional<std::string> selected = profile_name;
    SettingList                out;
    for (auto& kv : global) {
        if (kv.first == "active_profile") {
            if (!selected)
                selected = kv.second;
            continue;
        }
        out.push_back(kv);
    }
    if (selected) {
        auto it = std::find_if(profiles.begin(), profiles.end(), [&](const auto& p) { return p.first == *selected; });
        if (it == profiles.end())
            throw ConfigError("config: no profile named '" + *selected + "'");
        for (const auto& kv : it->second)
            if (kv.first != "active_profile")
                out.push_back(kv);
    }
    return out;
}

void load_config_file(JobConfig& job, const std::filesystem::path& path, const std::optional<std::string>& profile_name)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ParseError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    for (const auto& [key, value] : parse_config_text(ss.str(), profile_name))
        apply_setting(job, key, value);
}

} // namespace flexslice
