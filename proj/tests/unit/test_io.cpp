#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pxa/io/export.hpp"
#include "pxa/io/pnm.hpp"
#include "pxa/io/presets.hpp"
#include "pxa/io/scenario.hpp"

using namespace pxa;
using namespace pxa::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pxa_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ErrorKind kind_of(std::string_view text) {
    try {
        parse_scenario(text).validate();
    } catch (const ScenarioError& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::io;
}

constexpr std::string_view kMinimal = R"(
[scenario]
name = tiny
frames = 3
[scene]
width = 32
height = 32
background = 20
)";

}  // namespace

TEST_SUITE("io") {

TEST_CASE("graymap round trips") {
    const fs::path dir = scratch("pgm");
    Image<std::uint16_t> wide(5, 3);
    for (std::size_t i = 0; i < wide.size(); ++i) wide[i] = static_cast<std::uint16_t>(i * 4000);
    write_pgm(dir / "w.pgm", wide, 65535);
    const Graymap g = read_pgm(dir / "w.pgm");
    CHECK(g.maxval == 65535);
    CHECK(g.pixels == wide);

    Image<std::uint8_t> narrow(4, 2, 7);
    narrow(3, 1) = 255;
    write_pgm(dir / "n.pgm", narrow);
    const Graymap n = read_pgm(dir / "n.pgm");
    CHECK(n.maxval == 255);
    CHECK(n.pixels(3, 1) == 255);
    CHECK(n.pixels(0, 0) == 7);

    const Graymap plain = parse_pgm("P2\n# comment\n3 1\n9\n0 4 9\n");
    CHECK(plain.pixels(1, 0) == 4);
    CHECK(encode_pgm(wide, 65535).substr(0, 2) == "P5");

    CHECK_THROWS_AS(parse_pgm("P6\n1 1\n255\nabc"), IoError);
    CHECK_THROWS_AS(parse_pgm("P5\n4 4\n255\nab"), IoError);
    CHECK_THROWS_AS(read_pgm(dir / "missing.pgm"), IoError);
}

TEST_CASE("float map round trip") {
    const fs::path dir = scratch("pfm");
    Image<float> img(3, 2);
    img(0, 0) = 1.5f;
    img(2, 1) = -7.25f;
    write_pfm(dir / "f.pfm", img);
    CHECK(read_pfm(dir / "f.pfm") == img);
}

TEST_CASE("code widening") {
    Image<std::uint16_t> c(1, 1, 1023);
    CHECK(widen_codes(c, 10)(0, 0) == 1023 << 6);
    CHECK(exposure_gray(1) == 32);
    CHECK(exposure_gray(8) == 255);
}

TEST_CASE("scenario text round trip") {
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const Scenario s = load_preset(name);
        CHECK_NOTHROW(s.validate());
        CHECK(parse_scenario(print_scenario(s)) == s);
    }
    const Scenario tiny = parse_scenario(kMinimal);
    CHECK(tiny.frames == 3);
    CHECK(tiny.scene.width == 32);
}

TEST_CASE("scenario errors") {
    CHECK(kind_of("") == ErrorKind::validation);
    try {
        parse_scenario("").validate();
    } catch (const ScenarioError& e) {
        CHECK(e.message().find("scenario.name") != std::string::npos);
        CHECK(e.message().find("scene.background") != std::string::npos);
    }
    CHECK(kind_of("[scene\n") == ErrorKind::syntax);
    CHECK(kind_of(std::string(kMinimal) + "bogus_key = 1\n") != ErrorKind::io);
    CHECK(kind_of(std::string(kMinimal) + "[controller]\nkp = abc\n") == ErrorKind::syntax);

    const std::string gains = std::string(kMinimal) + "[controller]\nkp = 0.01\nki = 0.01\n";
    CHECK(kind_of(gains) == ErrorKind::gain_rule);
    try {
        parse_scenario(gains).validate();
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("gain rule") != std::string::npos);
    }

    try {
        parse_scenario("[scenario]\nname = a\nframes = x\n");
        FAIL("expected a syntax error");
    } catch (const ScenarioError& e) {
        CHECK(e.line() == 3);
    }
    CHECK(exit_code(ErrorKind::syntax) == 2);
    CHECK(exit_code(ErrorKind::validation) == 3);
    CHECK(exit_code(ErrorKind::gain_rule) == 4);
    CHECK(exit_code(ErrorKind::io) == 5);
}

TEST_CASE("export toggles") {
    const ExportToggles e = parse_exports("frames,metrics");
    CHECK(e.frames);
    CHECK(e.metrics);
    CHECK_FALSE(e.exposure);
    CHECK(parse_exports(print_exports(e)) == e);
    const ExportToggles all = parse_exports("all");
    CHECK((all.flow && all.hdr && all.exposure));
    CHECK_FALSE(parse_exports("none").metrics);
    CHECK_THROWS_AS(parse_exports("frames,video"), ContractViolation);
}

TEST_CASE("static-hdr preset is a 64:1 scene with the published gains") {
    const Scenario s = load_preset("static-hdr");
    REQUIRE(s.regions.size() == 1);
    CHECK(s.regions[0].region.flux / s.background == doctest::Approx(64.0));
    CHECK(s.system.controller.i_target == 800);
    CHECK(s.system.controller.e_tol == 120);
    CHECK(s.system.controller.kp == 0.01);
    CHECK(s.system.controller.ki == 0.001);
    CHECK_THROWS_AS(load_preset("nope"), ScenarioError);
}

TEST_CASE("run writes one artifact per frame") {
    const fs::path dir = scratch("run");
    Scenario s = parse_scenario(kMinimal);
    s.exports = parse_exports("all");
    const RunResult r = run_scenario(s, dir);
    CHECK(r.frames == 3);
    int frames = 0, maps = 0, flows = 0, hdrs = 0;
    for (const auto& e : fs::directory_iterator(dir / "frames")) frames += e.path().extension() == ".pgm";
    for (const auto& e : fs::directory_iterator(dir / "exposure")) maps += e.path().extension() == ".pgm";
    for (const auto& e : fs::directory_iterator(dir / "flow")) flows += e.path().extension() == ".pfm";
    for (const auto& e : fs::directory_iterator(dir / "hdr")) hdrs += e.path().extension() == ".pfm";
    CHECK(frames == 3);
    CHECK(maps == 3);
    CHECK(flows == 3);
    CHECK(hdrs == 3);

    std::ifstream csv(dir / "metrics.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == kMetricsHeader);
    int rows = 0;
    for (std::string line; std::getline(csv, line);) rows += !line.empty();
    CHECK(rows == 3);

    std::ifstream manifest(dir / "manifest.json");
    std::stringstream ss;
    ss << manifest.rdbuf();
    CHECK(ss.str().find("\"complete\"") != std::string::npos);
}

}
