#include "pxa/pipeline/loop.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace pxa::pipeline {

int LoopBudget::delay_frames() const noexcept {
    const double total = compute_us + rtt_us;
    if (total <= period_us) return 1;
    return static_cast<int>(std::ceil(total / period_us));
}

void LoopConfig::validate(int e_max) const {
    expect(initial_exposure >= 1 && initial_exposure <= e_max,
           "loop: initial exposure outside [1, e_max]");
    expect(dark_frames >= 2, "loop: at least two dark frames required");
    expect(compute_us >= 0.0, "loop: compute time must be >= 0");
    expect(saturation_margin >= 0, "loop: saturation margin must be >= 0");
    flow.validate();
}

LoopBudget LoopConfig::budget(double t_base_ms) const noexcept {
    return {worst_case_latency ? LoopBudget::kMaxRttUs : LoopBudget::kMeanRttUs, compute_us,
            t_base_ms * 1000.0};
}

namespace {

bool patterned(scene::Shape s) {
    return s == scene::Shape::bars || s == scene::Shape::blocks || s == scene::Shape::spokes ||
           s == scene::Shape::raster;
}

}  // namespace

Image<std::uint8_t> bright_mask(const scene::Scene& scene, double t_ms) {
    double lo = scene.background(), hi = scene.background();
    for (const auto& r : scene.regions()) {
        lo = std::min(lo, r.flux);
        hi = std::max(hi, r.flux);
        if (patterned(r.shape)) {
            lo = std::min(lo, r.flux_alt);
            hi = std::max(hi, r.flux_alt);
        }
    }
    // Geometric midpoint between the darkest and brightest levels.
    const double threshold = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
    const Image<double> img = scene.render(t_ms);
    Image<std::uint8_t> m(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) m[i] = img[i] > threshold;
    return m;
}

Trace run_closed_loop(const scene::Scene& scene, const SystemConfig& cfg, int n_frames,
                      const RunOptions& opts) {
    expect(n_frames >= 0, "run_closed_loop: frame count must be >= 0");
    cfg.sensor.validate();
    cfg.adc.validate();
    cfg.controller.validate_for(scene.width(), scene.height());
    cfg.loop.validate(std::min(cfg.sensor.e_max, cfg.controller.e_max));
    expect(cfg.sensor.e_max == cfg.controller.e_max, "run_closed_loop: sensor and controller e_max differ");

    const int w = scene.width(), h = scene.height();
    sensor::Sensor sensor(w, h, cfg.sensor, cfg.adc);
    Trace trace;

    std::vector<sensor::RawFrame> darks;
    darks.reserve(static_cast<std::size_t>(cfg.loop.dark_frames));
    for (int k = 0; k < cfg.loop.dark_frames; ++k) darks.push_back(sensor.dark_frame(k));
    trace.fpn = fpn_calibrate(std::span<const sensor::RawFrame>(darks));
    darks.clear();

    const int max_code = cfg.adc.max_code();
    const BandParams band{cfg.controller.i_target, cfg.controller.e_tol,
                          max_code - cfg.loop.saturation_margin};
    const LoopBudget budget = cfg.loop.budget(cfg.sensor.t_base_ms);
    const int delay = budget.delay_frames();

    controller::ControllerState state(w, h, cfg.loop.initial_exposure, cfg.controller);
    sensor::ExposureMap in_force(w, h, cfg.loop.initial_exposure);
    std::int64_t in_force_id = -1;
    struct Pending {
        std::int64_t id, eligible;
        sensor::ExposureMap map;
    };
    std::deque<Pending> queue;

    DisplayFrame prev_display = initial_display(w, h, cfg.loop.initial_exposure);
    DisplayFrame display;
    Image<float> prev_intensity;
    bool prev_primed = false;

    const bool static_scene = scene.kind() == scene::SceneKind::static_hdr;
    Image<std::uint8_t> bright;
    if (static_scene) bright = bright_mask(scene, 0.0);

    for (std::int64_t n = 0; n < n_frames; ++n) {
        while (!queue.empty() && queue.front().eligible <= n) {
            in_force = std::move(queue.front().map);
            in_force_id = queue.front().id;
            queue.pop_front();
        }
        trace.applied.push_back(in_force_id);

        FrameRecord rec;
        rec.applied = in_force;
        rec.dark_level = trace.fpn.mean;
        rec.raw = sensor.step(scene, in_force, n);

        Image<std::uint16_t> codes = fpn_correct(rec.raw.codes, trace.fpn, max_code);
        if (cfg.loop.median) codes = median3x3(codes);
        display = assemble_display(codes, rec.raw.updated, rec.raw.exposure, prev_display, n);
        rec.display = display;

        Image<float> intensity = display_intensity(display, max_code, trace.fpn.mean);
        if (prev_primed) {
            rec.flow = flow::estimate_flow(prev_intensity, intensity, cfg.loop.flow);
            // Only the clipped pixels themselves: widening the mask eats thin
            // bright texture, which is exactly what the estimator needs.
            invalidate_saturated(rec.flow, prev_display, display, band.saturation_code, 0);
        } else {
            rec.flow = flow::FlowField(w, h);
        }
        prev_intensity = std::move(intensity);
        prev_primed = display.primed();
        prev_display = display;

        auto step = controller::controller_step(display.code, rec.raw.updated, rec.flow,
                                                std::move(state), cfg.controller);
        state = std::move(step.state);
        rec.computed = step.exposure;
        for (const auto& b : state.blocks) {
            rec.block_modes.push_back(b.mode);
            rec.block_v.push_back(b.v);
        }

        queue.push_back({n, n + delay, std::move(step.exposure)});
        trace.maps.push_back({n, n + delay});
        const bool deferred = delay > 1;
        if (deferred) {
            ++trace.deferrals;
            trace.log.push_back({n, "map " + std::to_string(n) + " deferred by " +
                                        std::to_string(delay - 1) + " frame(s): compute " +
                                        std::to_string(budget.compute_us) + " us + rtt " +
                                        std::to_string(budget.rtt_us) + " us exceeds period"});
        }

        MetricsRecord& m = rec.metrics;
        m.frame = n;
        m.t_ms = static_cast<double>(n) * cfg.sensor.t_base_ms;
        if (!static_scene) bright = bright_mask(scene, m.t_ms + 0.5 * cfg.sensor.t_base_ms);
        fill_intensity_metrics(m, display.code, bright, band);
        m.blur_px = cfg.loop.probes.empty()
                        ? std::nan("")
                        : blur_metric(display_intensity(display, max_code, trace.fpn.mean), cfg.loop.probes);
        m.of_blocks = state.count(controller::Mode::of);
        m.pi_blocks = state.count(controller::Mode::pi);
        double se = 0.0, su = 0.0;
        for (std::size_t i = 0; i < rec.applied.size(); ++i) {
            se += rec.applied[i];
            su += rec.raw.updated[i];
        }
        m.mean_exposure = se / static_cast<double>(rec.applied.size());
        m.updated_fraction = su / static_cast<double>(rec.applied.size());
        m.applied_map = in_force_id;
        m.map_delay = delay;
        m.deferred = deferred;
        trace.metrics.push_back(m);

        if (opts.observer) opts.observer(rec);
        if (opts.keep_frames) trace.frames.push_back(std::move(rec));
    }
    return trace;
}

}  // namespace pxa::pipeline
