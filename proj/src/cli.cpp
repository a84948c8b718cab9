#include "flexslice/cli.hpp"

#include "flexslice/errors.hpp"
#include "flexslice/pipeline.hpp"
#include "flexslice/preview.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace flexslice {

namespace {

struct Options
{
    std::string                input;
    std::optional<std::string> out;
    std::optional<std::string> profile;
    std::optional<std::string> profile_name;
    std::vector<std::string>   sets;
    std::string                report_format = "text";
    std::optional<std::string> layers;
};

void add_job_options(CLI::App* cmd, Options& o, std::map<std::string, std::string>& values, bool needs_input = true)
{
    auto* input = cmd->add_option("input", o.input, "Input STL file");
    if (needs_input)
        input->required();
    cmd->add_option("--out,-o", o.out, "Output path");
    cmd->add_option("--profile", o.profile, "Config file (key = value)");
    cmd->add_option("--profile-name", o.profile_name, "Profile section to use from the config file");
    cmd->add_option("--set", o.sets, "Override a config key: key=value (repeatable)");
    cmd->add_option("--mode", values["mode"], "standard | upside-down");
    cmd->add_option("--layer-height", values["layer_height"], "Layer height in mm");
    cmd->add_option("--first-layer-height", values["first_layer_height"], "First layer height in mm");
    cmd->add_option("--perimeters", values["perimeters"], "Perimeter count");
    cmd->add_option("--infill", values["infill_density"], "Infill density in [0, 1]");
    cmd->add_option("--extrusion-width", values["extrusion_width"], "Extrusion width in mm");
    cmd->add_option("--threads", values["threads"], "Worker threads (0 = all cores)");
    cmd->add_flag("--no-supports", "Do not generate aero supports");
    cmd->add_flag("--override-drc", "Emit G-code even when DRC reports errors");
    cmd->add_option("--drc-report", o.report_format, "DRC report format")
        ->check(CLI::IsMember({ "text", "structured" }));
}

JobConfig build_job(CLI::App* cmd, const Options& o, const std::map<std::string, std::string>& values)
{
    JobConfig job;
    if (o.profile)
        load_config_file(job, *o.profile, o.profile_name);
    else if (o.profile_name)
        throw ConfigError("--profile-name needs --profile");
    for (const std::string& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        apply_setting(job, kv.substr(0, eq), kv.substr(eq + 1));
    }
    static const std::map<std::string, std::string> flag_of {
        { "mode", "--mode" },
        { "layer_height", "--layer-height" },
        { "first_layer_height", "--first-layer-height" },
        { "perimeters", "--perimeters" },
        { "infill_density", "--infill" },
        { "extrusion_width", "--extrusion-width" },
        { "threads", "--threads" },
    };
    auto given = [cmd](const std::string& flag) {
        const CLI::Option* opt = cmd->get_option_no_throw(flag);
        return opt && opt->count() > 0;
    };
    for (const auto& [key, flag] : flag_of)
        if (given(flag))
            apply_setting(job, key, values.at(key));
    if (given("--no-supports"))
        job.supports.enabled = false;
    if (given("--override-drc"))
        job.drc_override = true;
    if (!o.input.empty())
        job.input = o.input;
    if (o.out)
        job.output = *o.out;
    job.validate();
    return job;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text) || !f.flush())
        throw ParseError("cannot write " + path.string());
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ParseError("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string format_report(const DrcReport& r, const std::string& format)
{
    return format == "structured" ? r.to_structured() : r.to_text();
}

std::string summary(const DrcReport& r)
{
    return "drc: " + std::to_string(r.count(Severity::error)) + " error(s), " +
           std::to_string(r.count(Severity::warning)) + " warning(s)\n";
}

// "a:b" or a single layer; both ends inclusive.
std::pair<int, int> parse_layer_range(const std::string& text)
{
    auto to_int = [&](std::string_view s) {
        int v = 0;
        auto rc = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || rc.ec != std::errc() || rc.ptr != s.data() + s.size())
            throw ConfigError("--layers expects a:b, got '" + text + "'");
        return v;
    };
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        const int l = to_int(text);
        return { l, l };
    }
    return { to_int(std::string_view(text).substr(0, colon)), to_int(std::string_view(text).substr(colon + 1)) };
}

int cmd_check(const JobConfig& job, const Options& o, std::ostream& out, std::ostream& err)
{
    const SliceJob sj = analyze(load_stl(job.input), job);
    const std::string report = format_report(sj.report, o.report_format);
    if (o.out)
        write_file(*o.out, report);
    else
        out << report;
    err << summary(sj.report);
    return sj.report.has_errors() ? kExitDrcBlocked : kExitOk;
}

int cmd_slice(const JobConfig& job, const Options& o, std::ostream& out, std::ostream& err)
{
    SliceJob sj = analyze(load_stl(job.input), job);
    err << format_report(sj.report, o.report_format) << summary(sj.report);
    if (sj.report.has_errors() && !job.drc_override) {
        err << "refusing to emit G-code; fix the errors above or pass --override-drc\n";
        return kExitDrcBlocked;
    }
    plan_toolpaths(sj, job);
    const GcodeProgram program = emit_job(sj, job);
    std::filesystem::path dest = job.output;
    if (dest.empty()) {
        dest = job.input;
        dest.replace_extension(".gcode");
    }
    write_file(dest, program.text());
    out << "wrote " << dest.string() << ": " << program.metadata.at("LAYERS") << " layers, "
        << program.metadata.at("TIME") << " s, " << program.metadata.at("FILAMENT") << " mm filament\n";
    return kExitOk;
}

int cmd_preview(const JobConfig& job, const Options& o, std::ostream& out, std::ostream& err)
{
    SliceJob sj = analyze(load_stl(job.input), job);
    err << summary(sj.report);
    const int count = static_cast<int>(sj.slices.size());
    auto [first, last] = o.layers ? parse_layer_range(*o.layers) : std::pair { 0, count - 1 };
    first = std::max(first, 0);
    last  = std::min(last, count - 1);
    if (first > last)
        throw ConfigError("--layers selects no layer (the part has " + std::to_string(count) + ")");
    plan_toolpaths(sj, job);

    std::filesystem::path dir = job.output;
    if (dir.empty()) {
        dir = job.input;
        dir = dir.parent_path() / (dir.stem().string() + "_preview");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw ParseError("cannot create " + dir.string() + ": " + ec.message());
    const Vec2 extent { job.machine.build_volume.x, job.machine.build_volume.y };
    for (int i = first; i <= last; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "layer_%05d.svg", i);
        write_file(dir / name, render_layer_svg(sj.paths[i], sj.slices[i].index, sj.slices[i].top_z, extent));
    }
    out << "wrote " << (last - first + 1) << " layer(s) to " << dir.string() << "\n";
    return kExitOk;
}

int cmd_config(const JobConfig& job, std::ostream& out)
{
    for (const std::string& key : setting_keys())
        out << key << " = " << get_setting(job, key) << "\n";
    return kExitOk;
}

int cmd_estimate(const std::string& path, const JobConfig& job, std::ostream& out)
{
    const ParsedGcode parsed = parse_gcode(read_file(path));
    const double      accel  = parsed.acceleration.value_or(job.machine.max_accel);
    double            e      = 0.;
    for (const Move& m : parsed.moves)
        e += m.extrusion_length;
    char buf[256];
    std::snprintf(buf, sizeof buf, "time_s=%.6f\nfilament_mm=%.5f\nmoves=%zu\nlayers=%zu\naccel=%.3f\n",
                  estimate_time(parsed.moves, accel), e, parsed.moves.size(), parsed.layer_starts.size(), accel);
    out << buf;
    if (parsed.unknown_commands > 0)
        out << "unknown_commands=" << parsed.unknown_commands << "\n";
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app { "flexslice: toolpath compiler for flexible TPU parts", "flexslice" };
    app.require_subcommand(1);

    Options                            o;
    std::map<std::string, std::string> values;
    CLI::App* slice   = app.add_subcommand("slice", "Slice an STL into G-code");
    CLI::App* check   = app.add_subcommand("check", "Run the design-rule checker only");
    CLI::App* preview = app.add_subcommand("preview", "Write one SVG per layer");
    CLI::App* estimate = app.add_subcommand("estimate", "Print time and filament of a G-code file");
    CLI::App* config   = app.add_subcommand("config", "Print the effective configuration");
    for (CLI::App* cmd : { slice, check, preview })
        add_job_options(cmd, o, values);
    add_job_options(config, o, values, false);
    preview->add_option("--layers", o.layers, "Layer range a:b (inclusive)");
    estimate->add_option("input", o.input, "G-code file")->required();
    estimate->add_option("--profile", o.profile, "Config file (fallback acceleration)");
    estimate->add_option("--profile-name", o.profile_name, "Profile section");
    estimate->add_option("--set", o.sets, "Override a config key: key=value");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        JobConfig job = build_job(cmd, o, values);
        if (cmd == estimate)
            return cmd_estimate(o.input, job, out);
        if (cmd == config)
            return cmd_config(job, out);
        if (cmd == check)
            return cmd_check(job, o, out, err);
        if (cmd == slice)
            return cmd_slice(job, o, out, err);
        return cmd_preview(job, o, out, err);
    } catch (const ConfigError& e) {
        err << "invalid configuration: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const GeometryError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIoError;
    }
}

} // namespace flexslice
