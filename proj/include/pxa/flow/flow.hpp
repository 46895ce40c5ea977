#pragma once

#include <cstdint>

#include "pxa/common/image.hpp"

namespace pxa::flow {

// Displacement from the previous frame to the current one, in pixels per
// frame interval: curr(x + ux, y + uy) ~ prev(x, y).
struct FlowField {
    Image<float> ux;
    Image<float> uy;
    Image<std::uint8_t> valid;

    FlowField() = default;
    FlowField(int width, int height)
        : ux(width, height), uy(width, height), valid(width, height) {}
    int width() const noexcept { return ux.width(); }
    int height() const noexcept { return ux.height(); }
};

// Two-frame dense flow by quadratic polynomial expansion with iterative
// refinement over a Gaussian pyramid. Intensities are expected on a 0..255
// scale.
struct FlowParams {
    int levels = 3;
    double pyr_scale = 0.5;
    int poly_n = 3;            // expansion neighbourhood is (2n+1)^2
    double poly_sigma = 2.0;   // Gaussian applicability
    int win_size = 15;         // odd; Gaussian averaging window
    double win_sigma = 2.0;
    int iterations = 3;
    // Added to the 2x2 determinant. Damps flat or noise-only areas; sized for
    // inputs on a 0..255 scale.
    double regularization = 1e-3;
    // Added to the diagonal of the 2x2 system; suppresses noise-driven flow
    // along straight edges. Zero gives the classic estimator.
    double damping = 0.01;

    void validate() const;
    // Pixels closer than this to the border are marked invalid.
    int margin() const noexcept { return poly_n + win_size / 2; }
    friend bool operator==(const FlowParams&, const FlowParams&) = default;
};

FlowField estimate_flow(const Image<float>& prev, const Image<float>& curr,
                        const FlowParams& params = {});

// Euclidean magnitude; invalid pixels report 0.
Image<float> flow_magnitude(const FlowField& f);

}  // namespace pxa::flow
