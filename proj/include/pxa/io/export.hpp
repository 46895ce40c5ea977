#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "pxa/io/scenario.hpp"
#include "pxa/pipeline/metrics.hpp"

namespace pxa::io {

// Column order of metrics.csv. Frozen: append new columns at the end.
inline constexpr std::string_view kMetricsHeader =
    "frame,t_ms,saturated_frac,underexposed_frac,in_band_frac,blur_px,pi_blocks,of_blocks,"
    "mean_exposure,updated_frac,applied_map,map_delay,deferred";

std::string metrics_row(const pipeline::MetricsRecord& m);

// Value of PXA_OUTPUT_ROOT, else "pxa-out" under the working directory.
std::filesystem::path default_output_root();

// Exposure code to 8-bit gray: E * 32, clipped to 255.
std::uint8_t exposure_gray(std::uint8_t e) noexcept;

struct RunResult {
    std::filesystem::path out_dir;
    std::int64_t frames = 0;
    std::int64_t deferrals = 0;
    double wall_s = 0.0;
};

// Runs the closed loop and writes the enabled artifacts under out_dir:
//   frames/frame_NNNN.pgm     16-bit, codes << (16 - adc bits)
//   exposure/exposure_NNNN.pgm 8-bit, E * 32
//   flow/flow_NNNN.pfm         flow magnitude, px/frame
//   hdr/hdr_NNNN.pfm           codes/ms above dark, -1 where saturated
//   metrics.csv                one row per base frame
//   manifest.json              written first as "incomplete"
// Throws ScenarioError (io) on file errors.
RunResult run_scenario(const Scenario& s, const std::filesystem::path& out_dir);

}  // namespace pxa::io
