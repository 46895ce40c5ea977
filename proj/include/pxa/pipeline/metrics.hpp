#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pxa/common/image.hpp"
#include "pxa/scene/scene.hpp"

namespace pxa::pipeline {

// Path along which edge widths are measured: a segment from a to b, or a
// full circle of the given radius about `a`.
struct EdgeProbe {
    enum class Kind { segment, circle } kind = Kind::segment;
    scene::Vec2 a;
    scene::Vec2 b;
    double radius = 0.0;
    friend bool operator==(const EdgeProbe&, const EdgeProbe&) = default;
};

constexpr double kProbeStep = 0.25;  // px between profile samples

// Bilinear samples of img along the probe, every kProbeStep px.
std::vector<double> sample_profile(const Image<float>& img, const EdgeProbe& probe);

// 10-90 % rise distances (px) of every transition in the profile, with the
// levels taken between its 5th and 95th percentiles. Transitions whose ramp
// runs off the profile are skipped; so is a profile without contrast.
std::vector<double> edge_widths(std::span<const double> profile, double step = kProbeStep,
                                double min_contrast = 1.0);

// Mean edge width over all probes; NaN when no edge was found.
double blur_metric(const Image<float>& img, std::span<const EdgeProbe> probes);

struct MetricsRecord {
    std::int64_t frame = 0;
    double t_ms = 0.0;
    double saturated_fraction = 0.0;
    double underexposed_fraction = 0.0;  // among intended-bright pixels
    double in_band_fraction = 0.0;
    double blur_px = 0.0;
    int pi_blocks = 0;
    int of_blocks = 0;
    double mean_exposure = 0.0;
    double updated_fraction = 0.0;
    std::int64_t applied_map = -1;
    int map_delay = 1;
    bool deferred = false;
};

struct BandParams {
    double i_target = 800.0;
    double e_tol = 120.0;
    int saturation_code = 1021;  // codes >= this count as saturated
};

// Frame-level intensity statistics of `codes`; `bright` marks pixels whose
// scene radiance is on the bright side (may be empty).
void fill_intensity_metrics(MetricsRecord& rec, const Image<std::uint16_t>& codes,
                            const Image<std::uint8_t>& bright, const BandParams& band);

// For each pixel of `mask`: the number of fresh samples taken after
// `from_frame` up to and including the one after which the pixel stays in
// band for the rest of the sequence. -1 when it never settles.
// `codes[k]` / `fresh[k]` are the display codes and update flags of frame
// first_frame + k.
Image<int> settling_samples(std::span<const Image<std::uint16_t>> codes,
                            std::span<const Image<std::uint8_t>> fresh, std::int64_t first_frame,
                            std::int64_t from_frame, const Image<std::uint8_t>& mask,
                            const BandParams& band);

// First frame index after which every masked pixel stays in band; -1 if
// none.
std::int64_t settling_frame(std::span<const Image<std::uint16_t>> codes, std::int64_t first_frame,
                            const Image<std::uint8_t>& mask, const BandParams& band);

}  // namespace pxa::pipeline
