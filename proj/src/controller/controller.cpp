#include "pxa/controller/controller.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace pxa::controller {

namespace {

// Slack for the gain comparison so values printed at the bound pass.
constexpr double kGainSlack = 1e-12;

}  // namespace

void ControllerConfig::validate() const {
    expect(e_tol >= 0.0, "controller: e_tol must be >= 0");
    expect(kp >= 0.0 && ki >= 0.0 && kv >= 0.0, "controller: gains must be >= 0");
    expect(block_size >= 1, "controller: block_size must be >= 1");
    expect(t_switch >= 1, "controller: t_switch must be >= 1");
    expect(v_tol >= 0.0, "controller: v_tol must be >= 0");
    expect(e_max >= 1 && e_max <= 255, "controller: e_max must be in [1, 255]");
    expect(full_scale > 0.0, "controller: full_scale must be > 0");
    expect(i_target >= 0.0 && i_target <= full_scale, "controller: i_target outside code range");
}

void ControllerConfig::validate_for(int width, int height) const {
    validate();
    expect(width % block_size == 0 && height % block_size == 0,
           "controller: block_size " + std::to_string(block_size) + " must divide " +
               std::to_string(width) + "x" + std::to_string(height));
}

GainBounds gain_bounds(const ControllerConfig& cfg) noexcept {
    const double eps_max = std::max(cfg.i_target, cfg.full_scale - cfg.i_target) - cfg.e_tol;
    const double kp_max = eps_max > 0.0 ? cfg.e_max / eps_max : INFINITY;
    return {kp_max, 0.1 * cfg.kp};
}

void check_gain_rule(const ControllerConfig& cfg) {
    const GainBounds b = gain_bounds(cfg);
    if (cfg.kp > b.kp_max * (1.0 + kGainSlack)) {
        std::ostringstream os;
        os << "gain rule: kp = " << cfg.kp << " exceeds E_max / eps_max = " << b.kp_max;
        throw GainRuleViolation(os.str());
    }
    if (cfg.ki > b.ki_max * (1.0 + kGainSlack)) {
        std::ostringstream os;
        os << "gain rule: ki = " << cfg.ki << " exceeds 0.1 * kp = " << b.ki_max;
        throw GainRuleViolation(os.str());
    }
}

std::string_view to_string(Mode m) noexcept { return m == Mode::pi ? "pi" : "of"; }

double intensity_error(double intensity, const ControllerConfig& cfg) noexcept {
    const double e = intensity - cfg.i_target;
    return std::abs(e) > cfg.e_tol ? e : 0.0;
}

PiResult pi_update(double eps, double integral, int e_prev, const ControllerConfig& cfg) noexcept {
    if (eps == 0.0) return {std::clamp(e_prev, 1, cfg.e_max), 0.0};
    double sum = integral + eps;
    if (cfg.ki > 0.0) {
        const double bound = cfg.e_max / cfg.ki;
        sum = std::clamp(sum, -bound, bound);
    }
    const double r = cfg.kp * eps + cfg.ki * sum;
    const double e = std::floor(static_cast<double>(e_prev) - r);
    return {static_cast<int>(std::clamp(e, 1.0, static_cast<double>(cfg.e_max))), sum};
}

double block_flow_average(std::span<const double> frame_means) noexcept {
    if (frame_means.empty()) return 0.0;
    double s = 0.0;
    for (double v : frame_means) s += v;
    return s / static_cast<double>(frame_means.size());
}

double block_mean(const Image<float>& mag, int bx, int by, int m) noexcept {
    double s = 0.0;
    for (int y = by * m; y < (by + 1) * m; ++y)
        for (int x = bx * m; x < (bx + 1) * m; ++x) s += mag(x, y);
    return s / (static_cast<double>(m) * m);
}

int of_exposure(double v, const ControllerConfig& cfg) noexcept {
    const double e = std::floor(cfg.e_max - cfg.kv * v);
    return static_cast<int>(std::clamp(e, 1.0, static_cast<double>(cfg.e_max)));
}

void BlockState::push(double value, int capacity) {
    if (static_cast<int>(history.size()) != capacity) {
        history.assign(capacity, 0.0);
        head = filled = 0;
    }
    history[head] = value;
    head = (head + 1) % capacity;
    filled = std::min(filled + 1, capacity);
}

std::vector<double> BlockState::window() const {
    std::vector<double> w;
    w.reserve(filled);
    const int cap = static_cast<int>(history.size());
    for (int i = 0; i < filled; ++i) w.push_back(history[(head - filled + i + cap) % cap]);
    return w;
}

Mode next_mode(BlockState& b, double v, const ControllerConfig& cfg) noexcept {
    if (b.mode == Mode::pi) {
        if (v >= cfg.v_tol) {
            b.mode = Mode::of;
            b.quiet = 0;
        }
        return b.mode;
    }
    if (v < cfg.v_tol) {
        if (++b.quiet >= cfg.t_switch) {
            b.mode = Mode::pi;
            b.quiet = 0;
        }
    } else {
        b.quiet = 0;
    }
    return b.mode;
}

ControllerState::ControllerState(int width, int height, int initial_exposure,
                                 const ControllerConfig& cfg)
    : integral(width, height, 0.0), exposure(width, height, initial_exposure) {
    cfg.validate_for(width, height);
    expect(initial_exposure >= 1 && initial_exposure <= cfg.e_max,
           "controller: initial exposure outside [1, e_max]");
    blocks_x = width / cfg.block_size;
    blocks_y = height / cfg.block_size;
    blocks.resize(static_cast<std::size_t>(blocks_x) * blocks_y);
}

int ControllerState::count(Mode m) const noexcept {
    return static_cast<int>(std::count_if(blocks.begin(), blocks.end(),
                                          [m](const BlockState& b) { return b.mode == m; }));
}

StepResult controller_step(const Image<std::uint16_t>& codes, const Image<std::uint8_t>& fresh,
                           const flow::FlowField& flow, ControllerState state,
                           const ControllerConfig& cfg) {
    require_same_shape(codes, fresh, "controller_step (codes vs fresh)");
    require_same_shape(codes, flow.ux, "controller_step (codes vs flow)");
    require_same_shape(codes, state.exposure, "controller_step (codes vs state)");
    const int m = cfg.block_size;
    expect(state.blocks_x * m == codes.width() && state.blocks_y * m == codes.height(),
           "controller_step: state block grid does not match block_size");

    const Image<float> mag = flow::flow_magnitude(flow);
    // Before the display is primed there is no flow measurement at all; such
    // frames are not part of the averaging window.
    const bool measured = std::ranges::any_of(flow.valid.pixels(), [](std::uint8_t v) { return v != 0; });
    sensor::ExposureMap out = state.exposure;

    for (int by = 0; by < state.blocks_y; ++by)
        for (int bx = 0; bx < state.blocks_x; ++bx) {
            BlockState& b = state.blocks[by * state.blocks_x + bx];
            if (measured) b.push(block_mean(mag, bx, by, m), cfg.t_switch);
            const auto win = b.window();
            b.v = block_flow_average(win);
            const Mode mode = next_mode(b, b.v, cfg);

            if (mode == Mode::of) {
                const auto e = static_cast<std::uint8_t>(of_exposure(b.v, cfg));
                for (int y = by * m; y < (by + 1) * m; ++y)
                    for (int x = bx * m; x < (bx + 1) * m; ++x) {
                        out(x, y) = e;
                        state.integral(x, y) = 0.0;
                    }
                continue;
            }
            for (int y = by * m; y < (by + 1) * m; ++y)
                for (int x = bx * m; x < (bx + 1) * m; ++x) {
                    if (!fresh(x, y)) continue;
                    const double eps = intensity_error(codes(x, y), cfg);
                    const PiResult r = pi_update(eps, state.integral(x, y), out(x, y), cfg);
                    out(x, y) = static_cast<std::uint8_t>(r.exposure);
                    state.integral(x, y) = r.integral;
                }
        }
    state.exposure = out;
    return {std::move(out), std::move(state)};
}

}  // namespace pxa::controller
