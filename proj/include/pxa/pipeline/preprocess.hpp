#pragma once

#include <cstdint>
#include <span>

#include "pxa/common/image.hpp"
#include "pxa/flow/flow.hpp"
#include "pxa/sensor/sensor.hpp"

namespace pxa::pipeline {

// Per-pixel mean dark code and its global mean (the dark level).
struct FpnMap {
    Image<float> dark;
    double mean = 0.0;
};

// Requires at least two frames of equal shape.
FpnMap fpn_calibrate(std::span<const Image<std::uint16_t>> dark_frames);
FpnMap fpn_calibrate(std::span<const sensor::RawFrame> dark_frames);

// raw - dark, unclamped; zero-mean on calibration frames.
Image<float> fpn_residual(const Image<std::uint16_t>& raw, const FpnMap& fpn);

// Removes the per-pixel offset while keeping the global dark level, so the
// result stays on the code scale. Codes at or above `max_code` pass through.
Image<std::uint16_t> fpn_correct(const Image<std::uint16_t>& raw, const FpnMap& fpn,
                                 int max_code = 1023);

// 3x3 median with clamped borders.
Image<std::uint16_t> median3x3(const Image<std::uint16_t>& src);

// Zero-order hold over the per-pixel sampling schedule.
struct DisplayFrame {
    Image<std::uint16_t> code;
    Image<std::uint8_t> age;       // base frames since the held sample
    Image<std::uint8_t> exposure;  // E of the held sample
    Image<std::uint8_t> sampled;   // 1 once the pixel has produced a real sample
    std::int64_t index = -1;

    int width() const noexcept { return code.width(); }
    int height() const noexcept { return code.height(); }
    bool primed() const noexcept;
};

// Display state before frame 0.
DisplayFrame initial_display(int width, int height, int exposure);

DisplayFrame assemble_display(const Image<std::uint16_t>& codes,
                              const Image<std::uint8_t>& updated,
                              const Image<std::uint8_t>& exposure, const DisplayFrame& prev,
                              std::int64_t index);
DisplayFrame assemble_display(const sensor::RawFrame& raw, const DisplayFrame& prev);

// (code - dark) / E mapped onto [0, 255]; input to the flow estimator and
// the blur metric. Removing the pedestal keeps a static pixel's value
// unchanged when only its exposure changes.
Image<float> display_intensity(const DisplayFrame& d, int max_code = 1023, double dark = 0.0);

// Clipped codes carry no radiometric information once divided by E, so
// flow is marked invalid wherever a pixel within `radius` is saturated in
// either display frame.
void invalidate_saturated(flow::FlowField& flow, const DisplayFrame& prev, const DisplayFrame& curr,
                          int saturation_code, int radius);

struct HdrImage {
    Image<float> radiance;      // codes per ms above the dark level
    Image<std::uint8_t> valid;  // 0 where the code is saturated
};

HdrImage hdr_reconstruct(const Image<std::uint16_t>& codes, const Image<std::uint8_t>& exposure,
                         double dark_level, double t_base_ms, int saturation_code);
HdrImage hdr_reconstruct(const DisplayFrame& d, double dark_level, double t_base_ms,
                         int saturation_code);

}  // namespace pxa::pipeline
