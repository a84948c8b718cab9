#include "flexslice/gcode.hpp"

#include "flexslice/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

namespace flexslice {

std::string GcodeProgram::text() const
{
    std::string out;
    for (const std::string& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

namespace {

std::string fixed(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    // Never print "-0.000".
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos)
        s.erase(0, 1);
    return s;
}

// Integer when integral, otherwise up to 3 decimals.
std::string number(double v)
{
    if (v == std::round(v))
        return fixed(v, 0);
    std::string s = fixed(v, 3);
    while (s.back() == '0')
        s.pop_back();
    return s;
}

} // namespace

GcodeProgram emit_gcode(std::span<const LayerMoves> layers, const MachineProfile& profile, const EmitOptions& options)
{
    GcodeProgram prog;
    double       time = 0., filament = 0.;
    for (const LayerMoves& l : layers) {
        time += estimate_time(l.moves, profile);
        for (const Move& m : l.moves)
            filament += m.extrusion_length;
    }
    prog.metadata["TIME"]     = fixed(time, 6);
    prog.metadata["FILAMENT"] = fixed(filament, 5);
    prog.metadata["LAYERS"]   = std::to_string(layers.size());

    auto& out = prog.lines;
    out.push_back(options.accel_command == AccelCommand::klipper ? ";FLAVOR:Klipper" : ";FLAVOR:Generic");
    out.push_back(";TIME:" + prog.metadata["TIME"]);
    out.push_back(";FILAMENT:" + prog.metadata["FILAMENT"]);
    out.push_back(";LAYERS:" + prog.metadata["LAYERS"]);
    if (options.timestamp)
        out.push_back(";GENERATED:" + *options.timestamp);
    out.push_back(";HEADER_START");
    out.push_back("G90");
    out.push_back("M83");
    out.push_back("M109 S" + number(profile.nozzle_temperature));
    out.push_back("M106 S" + number(std::round(profile.fan_fraction * 255.)));
    if (profile.bed_temperature > 0.)
        out.push_back("M190 S" + number(profile.bed_temperature));
    if (options.accel_command == AccelCommand::klipper)
        out.push_back("SET_VELOCITY_LIMIT ACCEL=" + number(profile.max_accel));
    else
        out.push_back("M204 S" + number(profile.max_accel));
    out.push_back(";HEADER_END");

    std::optional<std::string> last_x, last_y, last_z;
    std::optional<long long>   last_f;
    std::optional<PathRole>    last_role;
    const Vec3&                bv = profile.build_volume;
    constexpr double           tol = 1e-9;

    for (const LayerMoves& layer : layers) {
        out.push_back(";LAYER:" + std::to_string(layer.layer_index));
        for (const Move& m : layer.moves) {
            if (m.extrusion_length < 0. && !options.retraction_enabled)
                throw ConfigError("negative extrusion emitted with retraction disabled");
            const Vec3& p = m.to;
            if (!options.override_build_volume &&
                (p.x < -tol || p.y < -tol || p.z < -tol || p.x > bv.x + tol || p.y > bv.y + tol || p.z > bv.z + tol))
                throw GeometryError("move to (" + fixed(p.x, 3) + ", " + fixed(p.y, 3) + ", " + fixed(p.z, 3) +
                                    ") leaves the build volume");

            if (m.extrusion_length > 0. && last_role != m.role) {
                out.push_back(";TYPE:" + std::string(to_string(m.role)));
                last_role = m.role;
            }

            std::string line = "G1";
            bool        any  = false;
            auto axis = [&](char name, double v, std::optional<std::string>& last) {
                std::string s = fixed(v, 3);
                if (last != s) {
                    line += ' ';
                    line += name;
                    line += s;
                    last = s;
                    any  = true;
                }
            };
            axis('X', p.x, last_x);
            axis('Y', p.y, last_y);
            axis('Z', p.z, last_z);
            if (m.extrusion_length != 0.) {
                line += " E" + fixed(m.extrusion_length, 5);
                any = true;
            }
            if (!any)
                continue;
            const long long f = std::llround(m.feedrate * 60.);
            if (last_f != f) {
                line += " F" + std::to_string(f);
                last_f = f;
            }
            out.push_back(std::move(line));
        }
    }

    out.push_back(";FOOTER_START");
    out.push_back("M104 S0");
    out.push_back("M84");
    out.push_back("M107");
    out.push_back(";FOOTER_END");
    return prog;
}

// ---------------------------------------------------------------------------

namespace {

std::optional<PathRole> role_from_name(std::string_view s)
{
    for (PathRole r : { PathRole::outer_perimeter, PathRole::inner_perimeter, PathRole::infill, PathRole::bridge,
                        PathRole::support, PathRole::travel })
        if (to_string(r) == s)
            return r;
    return std::nullopt;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

double parse_value(std::string_view tok, std::size_t line_no)
{
    double v = 0.;
    // from_chars rejects a leading '+'.
    std::string_view body = !tok.empty() && tok.front() == '+' ? tok.substr(1) : tok;
    auto             res  = std::from_chars(body.data(), body.data() + body.size(), v);
    if (body.empty() || res.ec != std::errc {} || res.ptr != body.data() + body.size() || !std::isfinite(v))
        throw ParseError("G-code line " + std::to_string(line_no) + ": malformed number '" + std::string(tok) + "'");
    return v;
}

std::string upper(std::string_view s)
{
    std::string u(s);
    for (char& c : u)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return u;
}

bool is_known_ignored(const std::string& cmd)
{
    static const char* known[] = { "M104", "M109", "M140", "M190", "M106", "M107", "M84", "M18",
                                   "G21",  "G4",   "M117", "M204", "SET_VELOCITY_LIMIT" };
    for (const char* k : known)
        if (cmd == k)
            return true;
    return false;
}

} // namespace

ParsedGcode parse_gcode(std::string_view text)
{
    ParsedGcode result;
    Vec3        pos;
    double      e_pos         = 0.;
    bool        relative_e    = false;
    double      feed          = 0.;
    bool        feed_warned   = false;
    PathRole    role          = PathRole::infill;
    std::size_t line_no       = 0;

    while (!text.empty()) {
        const std::size_t nl   = text.find('\n');
        std::string_view  raw  = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (!raw.empty() && raw.back() == '\r')
            raw.remove_suffix(1);

        std::string_view code = raw, comment;
        if (const auto sc = raw.find(';'); sc != std::string_view::npos) {
            code    = raw.substr(0, sc);
            comment = trim(raw.substr(sc + 1));
        }
        code = trim(code);

        if (code.empty() && !comment.empty()) {
            const auto colon = comment.find(':');
            if (colon != std::string_view::npos && colon > 0) {
                const std::string      key(comment.substr(0, colon));
                const std::string_view value = trim(comment.substr(colon + 1));
                if (key == "LAYER")
                    result.layer_starts.push_back(result.moves.size());
                else if (key == "TYPE") {
                    if (auto r = role_from_name(value))
                        role = *r;
                } else if (std::all_of(key.begin(), key.end(),
                                       [](char c) { return std::isupper(static_cast<unsigned char>(c)) || c == '_'; }))
                    result.metadata[key] = std::string(value);
            }
            continue;
        }
        if (code.empty())
            continue;

        std::vector<std::string_view> words;
        for (std::size_t i = 0; i < code.size();) {
            while (i < code.size() && std::isspace(static_cast<unsigned char>(code[i])))
                ++i;
            std::size_t j = i;
            while (j < code.size() && !std::isspace(static_cast<unsigned char>(code[j])))
                ++j;
            if (j > i)
                words.push_back(code.substr(i, j - i));
            i = j;
        }
        const std::string cmd = upper(words.front());

        if (cmd == "G0" || cmd == "G1") {
            Vec3   target = pos;
            double e      = 0.;
            bool   has_e = false, moved = false;
            for (std::size_t w = 1; w < words.size(); ++w) {
                const char       letter = static_cast<char>(std::toupper(static_cast<unsigned char>(words[w][0])));
                const double     v      = parse_value(words[w].substr(1), line_no);
                switch (letter) {
                case 'X': target.x = v; moved = true; break;
                case 'Y': target.y = v; moved = true; break;
                case 'Z': target.z = v; moved = true; break;
                case 'E': e = v; has_e = true; break;
                case 'F': feed = v / 60.; break;
                default:
                    throw ParseError("G-code line " + std::to_string(line_no) + ": unexpected word '" +
                                     std::string(words[w]) + "'");
                }
            }
            if (!moved && !has_e)
                continue;
            double delta = 0.;
            if (has_e) {
                delta = relative_e ? e : e - e_pos;
                e_pos = relative_e ? e_pos + e : e;
            }
            if (feed <= 0. && !feed_warned) {
                result.warnings.push_back("line " + std::to_string(line_no) + ": move before any feedrate");
                feed_warned = true;
            }
            Move m;
            m.from             = pos;
            m.to               = target;
            m.feedrate         = feed;
            m.extrusion_length = delta;
            m.role             = delta > 0. ? role : PathRole::travel;
            result.moves.push_back(m);
            pos = target;
        } else if (cmd == "G90") {
        } else if (cmd == "G91") {
            throw ParseError("G-code line " + std::to_string(line_no) + ": G91 relative positioning is unsupported");
        } else if (cmd == "M82") {
            relative_e = false;
        } else if (cmd == "M83") {
            relative_e = true;
        } else if (cmd == "G92") {
            for (std::size_t w = 1; w < words.size(); ++w) {
                const char   letter = static_cast<char>(std::toupper(static_cast<unsigned char>(words[w][0])));
                const double v      = parse_value(words[w].substr(1), line_no);
                if (letter == 'E') e_pos = v;
                else if (letter == 'X') pos.x = v;
                else if (letter == 'Y') pos.y = v;
                else if (letter == 'Z') pos.z = v;
            }
        } else if (cmd == "G28") {
            pos = {};
        } else if (is_known_ignored(cmd)) {
            if (cmd == "M204") {
                for (std::size_t w = 1; w < words.size(); ++w)
                    if (std::toupper(static_cast<unsigned char>(words[w][0])) == 'S')
                        result.acceleration = parse_value(words[w].substr(1), line_no);
            } else if (cmd == "SET_VELOCITY_LIMIT") {
                for (std::size_t w = 1; w < words.size(); ++w) {
                    const std::string u = upper(words[w]);
                    if (u.rfind("ACCEL=", 0) == 0)
                        result.acceleration = parse_value(words[w].substr(6), line_no);
                }
            }
        } else {
            ++result.unknown_commands;
            result.warnings.push_back("line " + std::to_string(line_no) + ": unknown command " + cmd + " skipped");
        }
    }
    return result;
}

} // namespace flexslice
