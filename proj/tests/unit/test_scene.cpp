#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pxa/scene/scene.hpp"

using namespace pxa;
using namespace pxa::scene;

namespace {

Scene disc_scene() {
    Region d;
    d.shape = Shape::disc;
    d.center = {32, 32};
    d.radius = 10;
    d.flux = 64.0;
    return Scene({64, 64, 64.0, 1, 4}, 1.0, {d});
}

}  // namespace

TEST_SUITE("scene") {

TEST_CASE("radiance inside a static disc and on the background") {
    const Scene s = disc_scene();
    CHECK(s.radiance_at(32, 32, 0.0) == doctest::Approx(64.0));
    CHECK(s.radiance_at(2, 2, 0.0) == doctest::Approx(1.0));
    CHECK(s.kind() == SceneKind::static_hdr);
}

TEST_CASE("translation is a shift of the radiance field") {
    Region r;
    r.shape = Shape::blocks;
    r.center = {32, 32};
    r.half_width = 20;
    r.half_height = 20;
    r.period = 4;
    r.flux = 50;
    r.flux_alt = 5;
    r.motion.segments.push_back({0.0, 1e6, 2.0 / 30.0, 0.0, 0.0});  // 2 px per 30 ms
    const Scene s({64, 64, 10.0, 3, 4}, 1.0, {r});
    for (int y = 20; y < 44; y += 3)
        for (int x = 24; x < 44; x += 3)
            CHECK(s.radiance_at(x, y, 60.0) == doctest::Approx(s.radiance_at(x - 2, y, 30.0)).epsilon(1e-9));
}

TEST_CASE("rotation follows rotated coordinates") {
    Region r;
    r.shape = Shape::bars;
    r.center = {32, 32};
    r.half_width = 30;
    r.half_height = 30;
    r.period = 8;
    r.flux = 40;
    r.flux_alt = 4;
    const double omega = 0.002;  // rad/ms
    r.motion.segments.push_back({0.0, 1e6, 0.0, 0.0, omega});
    Region still = r;
    still.motion = {};
    const Scene moving({64, 64, 10.0, 1, 4}, 1.0, {r});
    const Scene fixed({64, 64, 10.0, 1, 4}, 1.0, {still});

    // A point of the rotated field equals the fixed field at the point
    // rotated back by the elapsed angle; checked on a 32x32 patch.
    const double t = 100.0, a = omega * t;
    int mismatches = 0;
    for (int j = 0; j < 32; ++j)
        for (int i = 0; i < 32; ++i) {
            const double px = 16.25 + i, py = 16.25 + j;
            const double dx = px - 32, dy = py - 32;
            // Positive angles turn +x towards +y.
            const double bx = 32 + std::cos(a) * dx + std::sin(a) * dy;
            const double by = 32 - std::sin(a) * dx + std::cos(a) * dy;
            const double got = moving.point_radiance(px, py, t);
            const double want = fixed.point_radiance(bx, by, 0.0);
            mismatches += std::abs(got - want) > 1e-9;
        }
    // Points within rounding distance of a bar edge may fall either way.
    CHECK(mismatches <= 8);
    CHECK(moving.kind() == SceneKind::rotate);
}

TEST_CASE("tangential speed of a rotating region is omega times radius") {
    Region r;
    r.shape = Shape::disc;
    r.center = {32, 32};
    r.radius = 30;
    r.flux = 1;
    r.motion.segments.push_back({0.0, 1e6, 0.0, 0.0, 0.01});
    const auto& m = r.motion;
    CHECK(m.angle(30.0) == doctest::Approx(0.3));
    CHECK(m.rotates());
    CHECK_FALSE(m.translates());
    // Arc length travelled at r = 20 over 30 ms.
    CHECK(20.0 * m.angle(30.0) == doctest::Approx(0.01 * 20.0 * 30.0));
}

TEST_CASE("temporal integration") {
    SUBCASE("constant flux") {
        const Scene s({16, 16, 1.0, 1, 1}, 2.0, {});
        CHECK(s.integrate_flux(5, 5, 0.0, 30.0) == doctest::Approx(60.0));
    }
    SUBCASE("zero radiance") {
        const Scene s({16, 16, 1.0, 1, 1}, 0.0, {});
        CHECK(s.integrate_flux(5, 5, 0.0, 30.0) == 0.0);
        CHECK(s.integrate_flux(5, 5, 17.0, 91.0) == 0.0);
    }
    SUBCASE("edge sweeping across a pixel matches a fine-step oracle") {
        Region r;
        r.shape = Shape::rect;
        r.center = {0, 8};
        r.half_width = 6;
        r.half_height = 20;
        r.flux = 10;
        r.motion.segments.push_back({0.0, 1e6, 0.1, 0.0, 0.0});
        const Scene s({16, 16, 1.0, 1, 4}, 0.0, {r});
        double oracle = 0.0;
        const double dt = 0.01;
        for (double t = dt / 2; t < 30.0; t += dt) oracle += s.radiance_at(7, 8, t) * dt;
        CHECK(s.integrate_flux(7, 8, 0.0, 30.0) == doctest::Approx(oracle).epsilon(0.01));
    }
    SUBCASE("additive over adjacent windows") {
        const Scene s = disc_scene();
        CHECK(s.integrate_flux(40, 32, 0.0, 60.0) ==
              doctest::Approx(s.integrate_flux(40, 32, 0.0, 30.0) + s.integrate_flux(40, 32, 30.0, 60.0)));
    }
}

TEST_CASE("contract violations") {
    const Scene s = disc_scene();
    CHECK_THROWS_AS((void)s.radiance_at(-1, 0, 0.0), ContractViolation);
    CHECK_THROWS_AS((void)s.integrate_flux(0, 0, 10.0, 5.0), ContractViolation);
    CHECK_THROWS_AS(shape_from_string("hexagon"), ContractViolation);
}

}
