#include "pxa/io/presets.hpp"

#include <array>
#include <utility>

namespace pxa::io {

namespace {

// A bright back-lit rectangle 64x brighter than its surround. At E = 1 the
// surround sits near the read-noise floor; at E = 8 the rectangle clips,
// and E = 6 puts it mid-band rather than on a band edge.
constexpr std::string_view kStaticHdr = R"(# Static high-dynamic-range scene.
[scenario]
name = static-hdr
frames = 40
seed = 1

[scene]
ratio = 64
background = 1.3125

[region]
shape = rect
center = 127.5, 127.5
half_width = 48
half_height = 48
flux = 84

[controller]
i_target = 800
e_tol = 120
kp = 0.01
ki = 0.001

[loop]
initial_exposure = 8
probe = segment 40 127.5 120 127.5
)";

// An 8:1 cutout that jumps 20 px to the right over frames 40-41. Both levels
// are reachable in band (background at E = 8, cutout at E = 1). v_tol sits
// above the 20 px / T_switch average so the jump stays under PI control.
constexpr std::string_view kInstantMotion = R"(# Instantaneous motion of a back-lit cutout.
[scenario]
name = instant-motion
frames = 64
seed = 1

[scene]
ratio = 8
background = 63.8

[region]
shape = rect
center = 99.5, 127.5
half_width = 30
half_height = 30
flux = 510
motion = 1200 1260 0.3333333333333333 0 0

[controller]
i_target = 800
e_tol = 120
kp = 0.01
ki = 0.001
kv = 2
block_size = 8
t_switch = 8
v_tol = 4

[loop]
initial_exposure = 8
probe = segment 40 127.5 180 127.5
)";

// A textured band on a wheel whose hub sits far below the frame, so the
// visible part sweeps sideways at ~5 px/frame like objects on a turntable.
// A bar stripe on the band gives the blur probe clean edges. Static block
// texture in the bottom half; uniform E = 4 at start.
constexpr std::string_view kRotate = R"(# Continuous rotation over a static textured floor.
[scenario]
name = rotate
frames = 40
seed = 1

[scene]
ratio = 7.75
supersample = 2
background = 125

[region]
shape = blocks
center = 128, 64
half_width = 320
half_height = 48
period = 8
flux = 155
flux_alt = 20
pivot = 128, 8064
motion = 0 1000000 0 0 0.000020833333333333333

# Thin bar stripe riding on the band; the blur probe runs along it.
[region]
shape = bars
center = 128, 64
half_width = 320
half_height = 6
period = 48
flux = 155
flux_alt = 20
pivot = 128, 8064
motion = 0 1000000 0 0 0.000020833333333333333

[region]
shape = blocks
center = 128, 192
half_width = 120
half_height = 56
period = 8
flux = 125
flux_alt = 62.5

# Wide deadband so PI holds the uniform start instead of chasing dark cells.
[controller]
i_target = 512
e_tol = 496
kp = 0.01
ki = 0.001
kv = 2
block_size = 8
t_switch = 8
v_tol = 0.5

[loop]
initial_exposure = 4
flow_levels = 4
probe = segment 40 64 216 64
)";

constexpr std::array<std::pair<std::string_view, std::string_view>, 3> kPresets{{
    {"static-hdr", kStaticHdr},
    {"instant-motion", kInstantMotion},
    {"rotate", kRotate},
}};

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [n, _] : kPresets) names.emplace_back(n);
    return names;
}

std::string_view preset_text(std::string_view name) {
    for (const auto& [n, text] : kPresets)
        if (n == name) return text;
    std::string known;
    for (const auto& [n, _] : kPresets) known += (known.empty() ? "" : ", ") + std::string(n);
    throw ScenarioError(ErrorKind::validation,
                        "unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

Scenario load_preset(std::string_view name) { return parse_scenario(preset_text(name)); }

}  // namespace pxa::io
