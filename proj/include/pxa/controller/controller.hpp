#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pxa/common/image.hpp"
#include "pxa/flow/flow.hpp"
#include "pxa/sensor/sensor.hpp"

namespace pxa::controller {

struct ControllerConfig {
    double i_target = 800.0;  // codes
    double e_tol = 120.0;     // codes
    double kp = 0.01;
    double ki = 0.001;
    double kv = 2.0;          // exposure steps per px/frame of flow
    int block_size = 8;       // M
    int t_switch = 8;         // control frames
    double v_tol = 0.5;       // px/frame
    int e_max = 8;
    double full_scale = 1023.0;

    // Structural invariants; the gain rule is checked separately.
    void validate() const;
    void validate_for(int width, int height) const;
    friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

// Raised for gains that break the stability rule. Distinct from plain
// validation failures so callers can report it separately.
class GainRuleViolation : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

struct GainBounds {
    double kp_max;
    double ki_max;  // relative to the configured kp
};

// kp_max = E_max / eps_max with eps_max the largest error that survives the
// dead band; ki_max = 0.1 kp.
GainBounds gain_bounds(const ControllerConfig& cfg) noexcept;

// Throws GainRuleViolation when kp or ki exceeds its bound.
void check_gain_rule(const ControllerConfig& cfg);

enum class Mode : std::uint8_t { pi = 0, of = 1 };

std::string_view to_string(Mode m) noexcept;

// Dead-banded intensity error: I - I_target outside the band, else 0.
double intensity_error(double intensity, const ControllerConfig& cfg) noexcept;

struct PiResult {
    int exposure;
    double integral;
};

// One PI update for a fresh sample. A zero error clears the integral and
// holds the exposure.
PiResult pi_update(double eps, double integral, int e_prev, const ControllerConfig& cfg) noexcept;

// Mean of per-frame block means; each frame holds M^2 pixels so this is the
// plain average over pixels and frames.
double block_flow_average(std::span<const double> frame_means) noexcept;

// Mean of `mag` over block (bx, by).
double block_mean(const Image<float>& mag, int bx, int by, int m) noexcept;

int of_exposure(double v, const ControllerConfig& cfg) noexcept;

struct BlockState {
    Mode mode = Mode::pi;
    int quiet = 0;          // consecutive frames with v < v_tol while in OF mode
    double v = 0.0;         // latest temporal average
    std::vector<double> history;  // ring of per-frame block means
    int head = 0;
    int filled = 0;

    void push(double block_mean_value, int capacity);
    std::vector<double> window() const;
};

// Mode transition for one block. Enters OF at v >= v_tol; leaves only after
// t_switch consecutive quiet frames.
Mode next_mode(BlockState& b, double v, const ControllerConfig& cfg) noexcept;

struct ControllerState {
    Image<double> integral;
    sensor::ExposureMap exposure;  // last emitted map, E(n-1)
    std::vector<BlockState> blocks;
    int blocks_x = 0;
    int blocks_y = 0;

    ControllerState() = default;
    ControllerState(int width, int height, int initial_exposure, const ControllerConfig& cfg);

    const BlockState& block(int bx, int by) const { return blocks[by * blocks_x + bx]; }
    int count(Mode m) const noexcept;
};

struct StepResult {
    sensor::ExposureMap exposure;
    ControllerState state;
};

// codes: preprocessed intensities; fresh: 1 where the pixel produced a new
// sample this frame.
StepResult controller_step(const Image<std::uint16_t>& codes, const Image<std::uint8_t>& fresh,
                           const flow::FlowField& flow, ControllerState state,
                           const ControllerConfig& cfg);

}  // namespace pxa::controller
