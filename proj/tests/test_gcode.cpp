#include "doctest.h"

#include "flexslice/errors.hpp"
#include "flexslice/gcode.hpp"

#include <algorithm>
#include <random>

using namespace flexslice;

namespace {

bool has_line(const GcodeProgram& p, const std::string& line)
{
    return std::find(p.lines.begin(), p.lines.end(), line) != p.lines.end();
}

std::size_t count_lines(const GcodeProgram& p, const std::string& line)
{
    return static_cast<std::size_t>(std::count(p.lines.begin(), p.lines.end(), line));
}

std::vector<LayerMoves> sample_program()
{
    LayerMoves l;
    l.layer_index = 0;
    l.z           = 0.2;
    l.moves.push_back(Move::make({ 0, 0, 0 }, { 1, 1, 0.2 }, 500., 0., PathRole::travel));
    l.moves.push_back(Move::make({ 1, 1, 0.2 }, { 10, 20, 0.2 }, 20., 0.1254, PathRole::outer_perimeter));
    l.moves.push_back(Move::make({ 10, 20, 0.2 }, { 40, 20, 0.2 }, 500., 0., PathRole::travel));
    return { l };
}

} // namespace

TEST_SUITE("gcode")
{
    TEST_CASE("motion line formatting")
    {
        const GcodeProgram p = emit_gcode(sample_program(), MachineProfile {});
        CHECK(has_line(p, "G1 X10.000 Y20.000 E0.12540 F1200"));
        CHECK(has_line(p, "G1 X40.000 F30000"));
        CHECK(has_line(p, "G1 X1.000 Y1.000 Z0.200 F30000"));
    }

    TEST_CASE("header and footer")
    {
        MachineProfile     prof;
        const GcodeProgram p = emit_gcode(sample_program(), prof);
        CHECK(count_lines(p, ";HEADER_START") == 1);
        CHECK(count_lines(p, ";HEADER_END") == 1);
        CHECK(count_lines(p, ";FOOTER_START") == 1);
        CHECK(count_lines(p, ";FOOTER_END") == 1);
        CHECK(has_line(p, "G90"));
        CHECK(has_line(p, "M83"));
        CHECK(has_line(p, "M109 S230"));
        CHECK(has_line(p, "M106 S255"));
        CHECK(has_line(p, "SET_VELOCITY_LIMIT ACCEL=10000"));
        CHECK(has_line(p, "M84"));
        CHECK(has_line(p, "M107"));
        CHECK(has_line(p, ";LAYER:0"));
        for (const std::string& l : p.lines)
            CHECK(l.rfind("M190", 0) != 0); // bed heater untouched
        CHECK(p.metadata.at("LAYERS") == "1");

        prof.bed_temperature = 60.;
        prof.fan_fraction    = 0.5;
        EmitOptions opts;
        opts.accel_command   = AccelCommand::m204;
        const GcodeProgram q = emit_gcode(sample_program(), prof, opts);
        CHECK(has_line(q, "M190 S60"));
        CHECK(has_line(q, "M106 S128"));
        CHECK(has_line(q, "M204 S10000"));
    }

    TEST_CASE("output is deterministic unless a timestamp is injected")
    {
        const auto a = emit_gcode(sample_program(), MachineProfile {}).text();
        const auto b = emit_gcode(sample_program(), MachineProfile {}).text();
        CHECK(a == b);
        CHECK(a.find("GENERATED") == std::string::npos);
        EmitOptions opts;
        opts.timestamp = "2026-01-01T00:00:00Z";
        CHECK(emit_gcode(sample_program(), MachineProfile {}, opts).text().find(";GENERATED:2026-01-01T00:00:00Z") !=
              std::string::npos);
    }

    TEST_CASE("moves outside the build volume are refused unless overridden")
    {
        auto prog = sample_program();
        prog[0].moves.push_back(Move::make({ 40, 20, 0.2 }, { 130, 20, 0.2 }, 500., 0., PathRole::travel));
        CHECK_THROWS_AS(emit_gcode(prog, MachineProfile {}), GeometryError);
        EmitOptions opts;
        opts.override_build_volume = true;
        CHECK_NOTHROW(emit_gcode(prog, MachineProfile {}, opts));
    }

    TEST_CASE("negative extrusion is refused with retraction disabled")
    {
        auto prog = sample_program();
        prog[0].moves.push_back(Move::make({ 40, 20, 0.2 }, { 40, 20, 0.2 }, 40., -0.8, PathRole::travel, true));
        CHECK_THROWS_AS(emit_gcode(prog, MachineProfile {}), ConfigError);
        EmitOptions opts;
        opts.retraction_enabled = true;
        const auto p            = emit_gcode(prog, MachineProfile {}, opts);
        CHECK(has_line(p, "G1 E-0.80000 F2400"));
    }

    TEST_CASE("feedrate is sticky")
    {
        const auto parsed = parse_gcode("G1 X1 Y2 F6000\nG1 X4 Y6\n");
        REQUIRE(parsed.moves.size() == 2);
        CHECK(parsed.moves[1].length() == doctest::Approx(5.));
        CHECK(parsed.moves[1].feedrate == doctest::Approx(100.));
    }

    TEST_CASE("unknown commands are skipped and counted")
    {
        const auto a = parse_gcode("G1 X1 Y2 F6000\nG1 X4 Y6\n");
        const auto b = parse_gcode("G1 X1 Y2 F6000\nM999\nG1 X4 Y6\n");
        CHECK(b.unknown_commands == 1);
        CHECK(a.unknown_commands == 0);
        REQUIRE(a.moves.size() == b.moves.size());
        for (std::size_t i = 0; i < a.moves.size(); ++i)
            CHECK(a.moves[i].to == b.moves[i].to);
        CHECK_FALSE(b.warnings.empty());
    }

    TEST_CASE("relative positioning and malformed numbers are rejected")
    {
        CHECK_THROWS_AS(parse_gcode("G91\nG1 X1\n"), ParseError);
        CHECK_THROWS_AS(parse_gcode("G1 Xabc\n"), ParseError);
        CHECK_THROWS_AS(parse_gcode("G1 X1..2\n"), ParseError);
    }

    TEST_CASE("absolute extrusion and G92")
    {
        const auto p = parse_gcode("M82\nG1 X1 E1 F600\nG1 X2 E1.5\nG92 E0\nG1 X3 E0.25\n");
        REQUIRE(p.moves.size() == 3);
        CHECK(p.moves[0].extrusion_length == doctest::Approx(1.));
        CHECK(p.moves[1].extrusion_length == doctest::Approx(0.5));
        CHECK(p.moves[2].extrusion_length == doctest::Approx(0.25));
    }

    TEST_CASE("metadata, layers and acceleration are read back")
    {
        const auto prog   = emit_gcode(sample_program(), MachineProfile {});
        const auto parsed = parse_gcode(prog.text());
        CHECK(parsed.metadata.at("TIME") == prog.metadata.at("TIME"));
        CHECK(parsed.metadata.at("LAYERS") == "1");
        CHECK(parsed.layer_starts.size() == 1);
        REQUIRE(parsed.acceleration);
        CHECK(*parsed.acceleration == 10000.);
        CHECK(parsed.unknown_commands == 0);
        EmitOptions opts;
        opts.accel_command = AccelCommand::m204;
        CHECK(*parse_gcode(emit_gcode(sample_program(), MachineProfile {}, opts).text()).acceleration == 10000.);
    }

    TEST_CASE("random programs survive a round trip")
    {
        std::mt19937_64                        rng(41);
        std::uniform_real_distribution<double> xy(0., 120.), e(0., 2.), f(5., 500.);
        MachineProfile                         prof;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<LayerMoves> layers;
            Vec3                    pos {};
            for (int li = 0; li < 5; ++li) {
                LayerMoves l;
                l.layer_index = li;
                l.z           = quantize_position(0.2 * (li + 1));
                for (int k = 0; k < 50; ++k) {
                    const Vec3 to { quantize_position(xy(rng)), quantize_position(xy(rng)), l.z };
                    const bool travel = rng() % 3 == 0;
                    l.moves.push_back(Move::make(pos, to, quantize_feedrate(travel ? 500. : f(rng)),
                                                 travel ? 0. : quantize_extrusion(e(rng)),
                                                 travel ? PathRole::travel : PathRole::infill));
                    pos = to;
                }
                layers.push_back(l);
            }
            const GcodeProgram prog   = emit_gcode(layers, prof);
            const ParsedGcode  parsed = parse_gcode(prog.text());
            std::vector<Move>  flat;
            for (const auto& l : layers)
                flat.insert(flat.end(), l.moves.begin(), l.moves.end());
            REQUIRE(parsed.moves.size() == flat.size());
            for (std::size_t i = 0; i < flat.size(); ++i) {
                CHECK(std::abs(parsed.moves[i].to.x - flat[i].to.x) < 5e-4);
                CHECK(std::abs(parsed.moves[i].to.y - flat[i].to.y) < 5e-4);
                CHECK(std::abs(parsed.moves[i].to.z - flat[i].to.z) < 5e-4);
                CHECK(std::abs(parsed.moves[i].extrusion_length - flat[i].extrusion_length) < 5e-6);
            }
            CHECK(std::abs(estimate_time(parsed.moves, prof) - estimate_time(flat, prof)) <= 1e-6);
            double cumulative = 0.;
            for (const Move& m : parsed.moves) {
                CHECK(m.extrusion_length >= 0.);
                cumulative += m.extrusion_length;
            }
            CHECK(cumulative == doctest::Approx(std::stod(prog.metadata.at("FILAMENT"))).epsilon(1e-9));
        }
    }
}
