#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pxa/controller/controller.hpp"
#include "pxa/flow/flow.hpp"
#include "pxa/pipeline/metrics.hpp"
#include "pxa/pipeline/preprocess.hpp"
#include "pxa/scene/scene.hpp"
#include "pxa/sensor/adc.hpp"
#include "pxa/sensor/sensor.hpp"

namespace pxa::pipeline {

// Timing of one control iteration against the base frame period.
struct LoopBudget {
    double rtt_us = 70.0;
    double compute_us = 1000.0;
    double period_us = 30000.0;

    static constexpr double kMeanRttUs = 70.0;
    static constexpr double kMaxRttUs = 85.0;

    // Base frames between computing a map and its earliest use; 1 when the
    // iteration fits in a period.
    int delay_frames() const noexcept;
};

struct LoopConfig {
    int initial_exposure = 8;
    bool median = true;
    int dark_frames = 16;
    bool worst_case_latency = false;
    // Modeled controller compute time; a constant keeps traces reproducible.
    double compute_us = 1000.0;
    int saturation_margin = 2;  // codes within this of full scale count as saturated
    flow::FlowParams flow;
    std::vector<EdgeProbe> probes;

    void validate(int e_max) const;
    LoopBudget budget(double t_base_ms) const noexcept;
    friend bool operator==(const LoopConfig&, const LoopConfig&) = default;
};

struct SystemConfig {
    sensor::SensorConfig sensor;
    sensor::AdcConfig adc;
    controller::ControllerConfig controller;
    LoopConfig loop;
    friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

struct LogEvent {
    std::int64_t frame;
    std::string message;
};

// Everything produced during one base frame.
struct FrameRecord {
    sensor::RawFrame raw;
    DisplayFrame display;
    flow::FlowField flow;
    sensor::ExposureMap applied;   // map the sensor latched from this frame
    sensor::ExposureMap computed;  // controller output at the end of this frame
    std::vector<controller::Mode> block_modes;
    std::vector<double> block_v;
    MetricsRecord metrics;
    double dark_level = 0.0;  // from the FPN calibration
};

struct MapEvent {
    std::int64_t id;        // frame at which the map was computed
    std::int64_t eligible;  // first frame it may be latched
};

struct Trace {
    FpnMap fpn;
    std::vector<MetricsRecord> metrics;
    std::vector<MapEvent> maps;
    std::vector<std::int64_t> applied;  // map id in force at each frame, -1 = initial
    std::vector<LogEvent> log;
    std::vector<FrameRecord> frames;    // filled only when keep_frames is set
    std::int64_t deferrals = 0;
};

using FrameObserver = std::function<void(const FrameRecord&)>;

struct RunOptions {
    bool keep_frames = false;
    FrameObserver observer;
};

// Dark calibration followed by n_frames closed-loop iterations:
// sensor step, preprocessing, display assembly, flow against the previous
// display, controller step, latency gate.
Trace run_closed_loop(const scene::Scene& scene, const SystemConfig& cfg, int n_frames,
                      const RunOptions& opts = {});

// Pixels on the bright side of the scene at time t.
Image<std::uint8_t> bright_mask(const scene::Scene& scene, double t_ms);

}  // namespace pxa::pipeline
