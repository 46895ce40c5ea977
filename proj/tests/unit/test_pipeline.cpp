#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pxa/common/rng.hpp"
#include "pxa/pipeline/loop.hpp"
#include "pxa/pipeline/metrics.hpp"
#include "pxa/pipeline/preprocess.hpp"

using namespace pxa;
using namespace pxa::pipeline;

namespace {

Image<std::uint16_t> constant(int w, int h, std::uint16_t v) { return {w, h, v}; }

// Box blur of length L (px) over a unit step at x0, on a 0..255 scale.
std::vector<double> blurred_step(int n, double x0, double len) {
    std::vector<double> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = i * kProbeStep;
        const double f = len <= 0.0 ? (x >= x0 ? 1.0 : 0.0) : std::clamp((x - x0) / len + 0.5, 0.0, 1.0);
        p[static_cast<std::size_t>(i)] = 20.0 + 200.0 * f;
    }
    return p;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("fixed-pattern calibration") {
    const int w = 8, h = 8, n = 64;
    Image<float> offset(w, h);
    std::mt19937 g(4);
    std::normal_distribution<double> fpn(0.0, 6.0), read(0.0, 2.0);
    for (std::size_t i = 0; i < offset.size(); ++i) offset[i] = static_cast<float>(fpn(g));
    std::vector<Image<std::uint16_t>> frames;
    for (int k = 0; k < n; ++k) {
        Image<std::uint16_t> f(w, h);
        for (std::size_t i = 0; i < f.size(); ++i)
            f[i] = static_cast<std::uint16_t>(std::lround(40.0 + offset[i] + read(g)));
        frames.push_back(f);
    }
    const FpnMap m = fpn_calibrate(frames);
    CHECK(m.mean == doctest::Approx(40.0).epsilon(0.05));
    for (std::size_t i = 0; i < offset.size(); ++i)
        CHECK(std::abs(m.dark[i] - m.mean - offset[i]) < 4.0 * 2.0 / std::sqrt(n) + 0.5);

    SUBCASE("calibration is idempotent") {
        std::vector<Image<std::uint16_t>> corrected;
        for (const auto& f : frames) corrected.push_back(fpn_correct(f, m));
        const FpnMap again = fpn_calibrate(corrected);
        double worst = 0.0;
        for (std::size_t i = 0; i < again.dark.size(); ++i)
            worst = std::max(worst, std::abs(again.dark[i] - again.mean));
        CHECK(worst < 1.0);
    }
    SUBCASE("no offsets gives a flat map") {
        const std::vector<Image<std::uint16_t>> flat(4, constant(w, h, 16));
        const FpnMap z = fpn_calibrate(flat);
        CHECK(z.mean == 16.0);
        CHECK(fpn_residual(flat[0], z) == Image<float>(w, h, 0.f));
    }
    SUBCASE("saturated codes pass through") {
        Image<std::uint16_t> raw = constant(w, h, 1023);
        CHECK(fpn_correct(raw, m) == raw);
    }
    CHECK_THROWS_AS(fpn_calibrate(std::vector<Image<std::uint16_t>>{frames[0]}), ContractViolation);
}

TEST_CASE("median filter") {
    CHECK(median3x3(constant(9, 7, 321)) == constant(9, 7, 321));
    Image<std::uint16_t> dead = constant(9, 7, 500);
    dead(4, 3) = 0;
    CHECK(median3x3(dead) == constant(9, 7, 500));
}

TEST_CASE("display assembly") {
    const int w = 4, h = 2;
    const DisplayFrame d0 = initial_display(w, h, 4);
    CHECK_FALSE(d0.primed());
    const Image<std::uint16_t> codes = constant(w, h, 300);
    const Image<std::uint8_t> all(w, h, 1), none(w, h, 0), ex(w, h, 2);

    const DisplayFrame d1 = assemble_display(codes, all, ex, d0, 0);
    CHECK(d1.code == codes);
    CHECK(d1.age == Image<std::uint8_t>(w, h, 0));
    CHECK(d1.primed());

    const DisplayFrame d2 = assemble_display(constant(w, h, 900), none, ex, d1, 1);
    CHECK(d2.code == codes);
    CHECK(d2.age == Image<std::uint8_t>(w, h, 1));

    SUBCASE("checkerboard of E = 1 and E = 2") {
        DisplayFrame d = d1;
        for (int n = 2; n < 6; ++n) {
            Image<std::uint8_t> upd(w, h);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) upd(x, y) = ((x + y) % 2 == 0) || (n % 2 == 1);
            d = assemble_display(codes, upd, ex, d, n);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    if ((x + y) % 2 == 0) CHECK(d.age(x, y) == 0);
                    else CHECK(d.age(x, y) == (n % 2 == 1 ? 0 : 1));
                }
        }
    }
}

TEST_CASE("display intensity normalises by exposure above the dark level") {
    DisplayFrame d = initial_display(2, 1, 1);
    d.code(0, 0) = 16 + 400;
    d.exposure(0, 0) = 4;
    d.code(1, 0) = 16 + 100;
    d.exposure(1, 0) = 1;
    const Image<float> v = display_intensity(d, 1023, 16.0);
    CHECK(v(0, 0) == doctest::Approx(v(1, 0)));
    CHECK(v(1, 0) == doctest::Approx(100.0 * 255.0 / (1023.0 - 16.0)));
}

TEST_CASE("flow is invalidated on saturated pixels") {
    const int w = 12, h = 6;
    DisplayFrame a = initial_display(w, h, 1), b = initial_display(w, h, 1);
    a.code.fill(500);
    b.code.fill(500);
    a.code(2, 2) = 1023;
    b.code(9, 3) = 1023;
    flow::FlowField f(w, h);
    f.valid.fill(1);
    invalidate_saturated(f, a, b, 1021, 0);
    CHECK(f.valid(2, 2) == 0);
    CHECK(f.valid(9, 3) == 0);
    CHECK(f.valid(3, 2) == 1);

    f.valid.fill(1);
    invalidate_saturated(f, a, b, 1021, 1);
    CHECK(f.valid(3, 3) == 0);
    CHECK(f.valid(4, 2) == 1);
    CHECK(f.valid(8, 4) == 0);
}

TEST_CASE("HDR reconstruction") {
    // F at E = 8 and 8F at E = 1 read the same code.
    Image<std::uint16_t> codes(2, 1, 600);
    Image<std::uint8_t> ex(2, 1);
    ex(0, 0) = 8;
    ex(1, 0) = 1;
    const HdrImage hdr = hdr_reconstruct(codes, ex, 16.0, 30.0, 1021);
    CHECK(hdr.radiance(1, 0) / hdr.radiance(0, 0) == doctest::Approx(8.0));
    codes(0, 0) = 1023;
    CHECK(hdr_reconstruct(codes, ex, 16.0, 30.0, 1021).valid(0, 0) == 0);
    const Image<std::uint8_t> four(2, 1, 4);
    const HdrImage u = hdr_reconstruct(Image<std::uint16_t>(2, 1, 416), four, 16.0, 30.0, 1021);
    CHECK(u.radiance(0, 0) == doctest::Approx(400.0 / 120.0));
}

TEST_CASE("edge-spread metric") {
    SUBCASE("ideal step is at most one pixel wide") {
        const auto w = edge_widths(blurred_step(200, 20.0, 0.0));
        REQUIRE(w.size() == 1);
        CHECK(w[0] <= 1.0);
    }
    SUBCASE("motion blur of v px/frame over E frames") {
        for (double v : {1.0, 2.5, 5.0})
            for (int e : {1, 2, 4}) {
                const double len = v * e;
                const auto w = edge_widths(blurred_step(400, 50.0, len));
                REQUIRE(w.size() == 1);
                // 10-90 % of a box ramp spans 0.8 of its length.
                CHECK(w[0] == doctest::Approx(0.8 * len).epsilon(0.05));
            }
    }
    SUBCASE("a noisy transition is counted once") {
        auto p = blurred_step(200, 20.0, 8.0);
        p[80] = p[81] + 30.0;  // bump at the midpoint
        CHECK(edge_widths(p).size() == 1);
    }
    SUBCASE("flat profile has no edges") { CHECK(edge_widths(std::vector<double>(50, 7.0)).empty()); }
    SUBCASE("probe sampling") {
        Image<float> img(32, 8);
        for (int y = 0; y < 8; ++y)
            for (int x = 16; x < 32; ++x) img(x, y) = 100.f;
        const EdgeProbe seg{EdgeProbe::Kind::segment, {2, 4}, {30, 4}, 0.0};
        const std::vector<EdgeProbe> probes{seg};
        CHECK(sample_profile(img, seg).size() == 113);
        CHECK(blur_metric(img, probes) == doctest::Approx(0.8).epsilon(0.01));
        CHECK(std::isnan(blur_metric(Image<float>(32, 8), probes)));
    }
}

TEST_CASE("frame intensity statistics") {
    MetricsRecord r;
    const BandParams band;
    fill_intensity_metrics(r, constant(4, 4, 1023), {}, band);
    CHECK(r.saturated_fraction == 1.0);
    CHECK(r.in_band_fraction == 0.0);
    Image<std::uint8_t> bright(4, 4, 1);
    fill_intensity_metrics(r, constant(4, 4, 800), bright, band);
    CHECK(r.in_band_fraction == 1.0);
    CHECK(r.underexposed_fraction == 0.0);
    fill_intensity_metrics(r, constant(4, 4, 100), bright, band);
    CHECK(r.underexposed_fraction == 1.0);
}

TEST_CASE("settling counts fresh samples") {
    const BandParams band;
    const Image<std::uint8_t> mask(1, 1, 1), yes(1, 1, 1), no(1, 1, 0);
    const std::vector<Image<std::uint16_t>> codes{constant(1, 1, 100), constant(1, 1, 300),
                                                  constant(1, 1, 300), constant(1, 1, 790),
                                                  constant(1, 1, 800)};
    const std::vector<Image<std::uint8_t>> fresh{yes, yes, no, yes, yes};
    CHECK(settling_samples(codes, fresh, 10, 10, mask, band)(0, 0) == 3);
    CHECK(settling_samples(codes, fresh, 10, 12, mask, band)(0, 0) == 1);
    CHECK(settling_frame(codes, 10, mask, band) == 13);
}

TEST_CASE("latency budget") {
    LoopBudget b;
    b.compute_us = 1000.0;
    b.rtt_us = LoopBudget::kMaxRttUs;
    CHECK(b.delay_frames() == 1);
    b.compute_us = 29915.0;
    CHECK(b.delay_frames() == 1);
    b.compute_us = 45000.0;
    CHECK(b.delay_frames() == 2);
    b.compute_us = 90000.0;
    CHECK(b.delay_frames() == 4);
}

TEST_CASE("closed loop on a static in-range scene holds its exposure") {
    // Flux chosen so E = 2 lands near the target code.
    const scene::Scene s({32, 32, 1.0, 1, 1}, 21.0, {});
    SystemConfig cfg;
    cfg.loop.initial_exposure = 2;
    cfg.sensor.fpn_sigma_e = 0.0;
    RunOptions opts;
    opts.keep_frames = true;
    const Trace t = run_closed_loop(s, cfg, 12, opts);
    REQUIRE(t.frames.size() == 12);
    for (std::size_t k = 2; k < t.frames.size(); ++k) CHECK(t.frames[k].computed == t.frames[1].computed);
    CHECK(t.metrics.back().of_blocks == 0);
}

TEST_CASE("slow controller defers maps but never drops one") {
    const scene::Scene s({16, 16, 1.0, 1, 1}, 40.0, {});
    SystemConfig cfg;
    cfg.loop.compute_us = 45000.0;
    const Trace t = run_closed_loop(s, cfg, 20);
    CHECK(t.deferrals > 0);
    // Every computed map is latched in order, two frames after it was made.
    std::int64_t last = -1;
    for (std::size_t n = 0; n < t.applied.size(); ++n) {
        CHECK(t.applied[n] >= last);
        if (t.applied[n] >= 0) CHECK(static_cast<std::int64_t>(n) - t.applied[n] >= 2);
        last = t.applied[n];
    }
    CHECK(t.maps.size() == 20);
}

}
