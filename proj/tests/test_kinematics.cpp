#include "doctest.h"

#include "flexslice/errors.hpp"
#include "flexslice/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace flexslice;

namespace {

// Rest-to-rest trapezoid, written out independently.
double closed_form(double L, double v, double a)
{
    const double ramp = v * v / a; // distance spent accelerating plus braking
    if (L >= ramp)
        return 2. * v / a + (L - ramp) / v;
    return 2. * std::sqrt(L / a);
}

ToolPath path_with(PathRole role, double width = 0.4)
{
    ToolPath p;
    p.points = { { 0, 0 }, { 10, 0 } };
    p.role   = role;
    p.width  = width;
    return p;
}

} // namespace

TEST_SUITE("kinematics")
{
    TEST_CASE("buckling headroom")
    {
        CHECK(std::abs(buckling_headroom(2.85, 1.75) - 7.03) <= 0.01);
        CHECK(buckling_headroom(1.75, 1.75) == 1.);
        CHECK(buckling_headroom(3.5, 1.75) == doctest::Approx(16.));
        CHECK_THROWS_AS(buckling_headroom(0., 1.75), ConfigError);
        CHECK_THROWS_AS(buckling_headroom(1., -1.), ConfigError);
    }

    TEST_CASE("headroom is increasing and scale invariant")
    {
        std::mt19937_64                        rng(1);
        std::uniform_real_distribution<double> u(0.1, 5.);
        for (int i = 0; i < 200; ++i) {
            const double d = u(rng), r = u(rng), k = u(rng);
            CHECK(buckling_headroom(d * 1.01, r) > buckling_headroom(d, r));
            CHECK(buckling_headroom(k * d, k * r) == doctest::Approx(buckling_headroom(d, r)).epsilon(1e-12));
        }
    }

    TEST_CASE("extrusion length examples")
    {
        CHECK(std::abs(compute_extrusion(10, 0.4, 0.2, 2.85) - 0.12540) < 5e-6);
        CHECK(std::abs(compute_extrusion(10, 0.4, 0.2, 1.75) - 0.33260) < 5e-6);
        CHECK(compute_extrusion(0, 0.4, 0.2, 2.85) == 0.);
        CHECK(filament_area(2.85) == doctest::Approx(std::numbers::pi * 1.425 * 1.425));
    }

    TEST_CASE("extruded filament volume equals bead volume")
    {
        std::mt19937_64                        rng(2);
        std::uniform_real_distribution<double> len(0., 50.), w(0.2, 1.2), h(0.04, 1.), d(1., 3.);
        for (int i = 0; i < 200; ++i) {
            double       lhs = 0., rhs = 0.;
            const double fd  = d(rng);
            for (int k = 0; k < 20; ++k) {
                const double L = len(rng), W = w(rng), H = h(rng);
                lhs += compute_extrusion(L, W, H, fd) * filament_area(fd);
                rhs += L * W * H;
            }
            CHECK(std::abs(lhs - rhs) <= 1e-9 * rhs);
        }
    }

    TEST_CASE("feedrate limits")
    {
        MachineProfile prof;
        CHECK(limit_feedrate(path_with(PathRole::infill), 0.2, prof) == doctest::Approx(150.));
        CHECK(limit_feedrate(path_with(PathRole::outer_perimeter), 0.2, prof) == doctest::Approx(100.));
        CHECK(limit_feedrate(path_with(PathRole::travel), 0.2, prof) == doctest::Approx(500.));
        CHECK(limit_feedrate(path_with(PathRole::bridge), 0.2, prof) == doctest::Approx(40.));

        // A thinner filament than the reference scales the flow cap down by (d/d_ref)^4.
        prof.filament_diameter  = 1.75;
        prof.reference_diameter = 2.85;
        const double scale      = std::pow(1.75 / 2.85, 4);
        CHECK(prof.effective_flow() == doctest::Approx(12. * scale));
        CHECK(limit_feedrate(path_with(PathRole::infill), 0.2, prof) == doctest::Approx(150. * scale));
    }

    TEST_CASE("time examples")
    {
        const Move m100 = Move::make({ 0, 0, 0 }, { 100, 0, 0 }, 500., 0., PathRole::travel);
        CHECK(move_time(m100, 10000.) == doctest::Approx(0.25).epsilon(1e-15));
        const Move m10 = Move::make({ 0, 0, 0 }, { 10, 0, 0 }, 500., 0., PathRole::travel);
        CHECK(std::abs(move_time(m10, 10000.) - 0.06325) < 5e-6);
        CHECK(estimate_time(std::vector<Move> {}, 10000.) == 0.);
        MachineProfile prof;
        const std::vector<Move> both { m100, m10 };
        CHECK(estimate_time(both, prof) == doctest::Approx(0.25 + 2. * std::sqrt(10. / 10000.)));
    }

    TEST_CASE("time matches the closed form on random moves")
    {
        std::mt19937_64                        rng(3);
        std::uniform_real_distribution<double> L(0., 300.), v(1., 600.), a(100., 20000.);
        for (int i = 0; i < 2000; ++i) {
            const double l = L(rng), f = v(rng), acc = a(rng);
            const Move   m = Move::make({ 0, 0, 0 }, { l, 0, 0 }, f, 0., PathRole::travel);
            CHECK(std::abs(move_time(m, acc) - closed_form(l, f, acc)) <= 1e-9);
        }
    }

    TEST_CASE("splitting a move never shortens its estimate")
    {
        std::mt19937_64                        rng(4);
        std::uniform_real_distribution<double> L(0.01, 200.), v(1., 600.), t(0.01, 0.99);
        for (int i = 0; i < 2000; ++i) {
            const double l = L(rng), f = v(rng), s = t(rng);
            const Move   whole = Move::make({ 0, 0, 0 }, { l, 0, 0 }, f, 0., PathRole::travel);
            const Move   a     = Move::make({ 0, 0, 0 }, { s * l, 0, 0 }, f, 0., PathRole::travel);
            const Move   b     = Move::make({ s * l, 0, 0 }, { l, 0, 0 }, f, 0., PathRole::travel);
            CHECK(move_time(a, 10000.) + move_time(b, 10000.) >= move_time(whole, 10000.) - 1e-12);
        }
    }

    TEST_CASE("negative extrusion needs retraction")
    {
        CHECK_THROWS_AS(Move::make({}, { 1, 0, 0 }, 10., -0.1, PathRole::travel), ConfigError);
        CHECK_NOTHROW(Move::make({}, { 1, 0, 0 }, 10., -0.1, PathRole::travel, true));
        CHECK_THROWS_AS(Move::make({}, { 1, 0, 0 }, 0., 0., PathRole::travel), ConfigError);
    }

    TEST_CASE("profile validation")
    {
        MachineProfile p;
        CHECK_NOTHROW(p.validate());
        p.bed_temperature = 0.;
        CHECK_NOTHROW(p.validate());
        p.bed_temperature = -1.;
        CHECK_THROWS_AS(p.validate(), ConfigError);
        p                   = {};
        p.max_accel         = 0.;
        CHECK_THROWS_AS(p.validate(), ConfigError);
    }

    TEST_CASE("planning quantises to the emitter resolution")
    {
        MachineProfile        prof;
        std::vector<ToolPath> paths;
        ToolPath              loop;
        loop.points = { { 1.23456, 2.34567 }, { 8.76543, 2.34567 }, { 8.76543, 9.1111 } };
        loop.closed = true;
        loop.role   = PathRole::outer_perimeter;
        loop.width  = 0.4;
        paths.push_back(loop);
        Vec3       pos {};
        const auto lm = plan_layer_moves(paths, 0, 0.2, 0.2, prof, pos);
        REQUIRE(lm.moves.size() == 4); // approach plus three edges
        CHECK(lm.moves[0].role == PathRole::travel);
        CHECK(lm.moves[0].extrusion_length == 0.);
        for (const Move& m : lm.moves) {
            CHECK(std::abs(m.to.x * 1000. - std::round(m.to.x * 1000.)) < 1e-6);
            CHECK(std::abs(m.extrusion_length * 1e5 - std::round(m.extrusion_length * 1e5)) < 1e-6);
            CHECK(std::abs(m.feedrate * 60. - std::round(m.feedrate * 60.)) < 1e-9);
            CHECK(m.extrusion_length >= 0.);
        }
        CHECK(pos == lm.moves.back().to);
        CHECK(lm.moves.back().to.x == doctest::Approx(1.235));
    }

    TEST_CASE("retraction, when enabled, wraps long travels")
    {
        MachineProfile        prof;
        ToolPath              a, b;
        a.points = { { 0, 0 }, { 5, 0 } };
        b.points = { { 50, 0 }, { 55, 0 } };
        a.role = b.role = PathRole::infill;
        a.width = b.width = 0.4;
        ToolPath t;
        t.role   = PathRole::travel;
        t.points = { { 5, 0 }, { 50, 0 } };
        const std::vector<ToolPath> paths { a, t, b };
        Vec3                        p1 { 0, 0, 0.2 };
        const auto                  off = plan_layer_moves(paths, 0, 0.2, 0.2, prof, p1);
        for (const Move& m : off.moves)
            CHECK(m.extrusion_length >= 0.);
        Vec3        p2 { 0, 0, 0.2 };
        PlanOptions opts;
        opts.retraction_enabled = true;
        const auto on           = plan_layer_moves(paths, 0, 0.2, 0.2, prof, p2, opts);
        int        negative     = 0;
        for (const Move& m : on.moves)
            negative += m.extrusion_length < 0.;
        CHECK(negative == 1);
        CHECK(total_extrusion(std::vector<LayerMoves> { on }) == doctest::Approx(total_extrusion(std::vector<LayerMoves> { off })));
    }
}
