#include "pxa/io/export.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "pxa/io/pnm.hpp"
#include "pxa/kernels/kernels.hpp"
#include "pxa/pipeline/loop.hpp"

#ifndef PXA_GIT_DESCRIBE
#define PXA_GIT_DESCRIBE "unknown"
#endif

namespace pxa::io {

namespace {

std::string num(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string frame_name(std::string_view stem, std::int64_t n, std::string_view ext) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%04lld.", static_cast<long long>(n));
    return std::string(stem) + buf + std::string(ext);
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(p, "cannot open for writing");
    out << text;
    if (!out) throw IoError(p, "write failed");
}

nlohmann::json manifest_base(const Scenario& s) {
    return {
        {"scenario", s.name},
        {"seed", s.seed},
        {"frames_requested", s.frames},
        {"git_describe", PXA_GIT_DESCRIBE},
        {"kernels", std::string(kernels::to_string(kernels::active().isa))},
        {"exports", print_exports(s.exports)},
        {"config", print_scenario(s)},
    };
}

}  // namespace

std::string metrics_row(const pipeline::MetricsRecord& m) {
    std::string r;
    r += std::to_string(m.frame) + ",";
    r += num(m.t_ms) + ",";
    r += num(m.saturated_fraction) + ",";
    r += num(m.underexposed_fraction) + ",";
    r += num(m.in_band_fraction) + ",";
    r += num(m.blur_px) + ",";
    r += std::to_string(m.pi_blocks) + ",";
    r += std::to_string(m.of_blocks) + ",";
    r += num(m.mean_exposure) + ",";
    r += num(m.updated_fraction) + ",";
    r += std::to_string(m.applied_map) + ",";
    r += std::to_string(m.map_delay) + ",";
    r += m.deferred ? "1" : "0";
    return r;
}

std::filesystem::path default_output_root() {
    if (const char* env = std::getenv("PXA_OUTPUT_ROOT"); env && *env) return env;
    return std::filesystem::current_path() / "pxa-out";
}

std::uint8_t exposure_gray(std::uint8_t e) noexcept {
    return static_cast<std::uint8_t>(std::min(static_cast<int>(e) * 32, 255));
}

RunResult run_scenario(const Scenario& s, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    const auto t_start = std::chrono::steady_clock::now();
    RunResult result{out_dir, 0, 0, 0.0};
    const fs::path manifest_path = out_dir / "manifest.json";

    nlohmann::json manifest = manifest_base(s);
    manifest["status"] = "incomplete";
    manifest["frames_written"] = 0;
    try {
        fs::create_directories(out_dir);
        if (s.exports.frames) fs::create_directories(out_dir / "frames");
        if (s.exports.exposure) fs::create_directories(out_dir / "exposure");
        if (s.exports.flow) fs::create_directories(out_dir / "flow");
        if (s.exports.hdr) fs::create_directories(out_dir / "hdr");
        write_text(manifest_path, manifest.dump(2) + "\n");
    } catch (const fs::filesystem_error& e) {
        throw ScenarioError(ErrorKind::io, e.what());
    } catch (const IoError& e) {
        throw ScenarioError(ErrorKind::io, e.what());
    }

    std::ofstream csv;
    if (s.exports.metrics) {
        csv.open(out_dir / "metrics.csv", std::ios::binary | std::ios::trunc);
        if (!csv) throw ScenarioError(ErrorKind::io, (out_dir / "metrics.csv").string() + ": cannot open for writing");
        csv << kMetricsHeader << "\n";
    }

    const int bits = s.system.adc.n_stages;
    const int sat_code = s.system.adc.max_code() - s.system.loop.saturation_margin;
    pipeline::Trace trace;

    pipeline::RunOptions opts;
    opts.observer = [&](const pipeline::FrameRecord& rec) {
        const std::int64_t n = rec.raw.index;
        if (s.exports.frames)
            write_pgm(out_dir / "frames" / frame_name("frame", n, "pgm"),
                      widen_codes(rec.raw.codes, bits), 65535);
        if (s.exports.exposure) {
            Image<std::uint8_t> g(rec.applied.width(), rec.applied.height());
            for (std::size_t i = 0; i < g.size(); ++i) g[i] = exposure_gray(rec.applied[i]);
            write_pgm(out_dir / "exposure" / frame_name("exposure", n, "pgm"), g);
        }
        if (s.exports.flow)
            write_pfm(out_dir / "flow" / frame_name("flow", n, "pfm"), flow::flow_magnitude(rec.flow));
        if (s.exports.hdr) {
            auto h = pipeline::hdr_reconstruct(rec.display, rec.dark_level, s.system.sensor.t_base_ms, sat_code);
            for (std::size_t i = 0; i < h.radiance.size(); ++i)
                if (!h.valid[i]) h.radiance[i] = -1.0f;
            write_pfm(out_dir / "hdr" / frame_name("hdr", n, "pfm"), h.radiance);
        }
        if (csv.is_open()) {
            csv << metrics_row(rec.metrics) << "\n";
            if (!csv) throw IoError(out_dir / "metrics.csv", "write failed");
        }
        ++result.frames;
    };

    try {
        trace = pipeline::run_closed_loop(s.build_scene(), s.system, s.frames, opts);
    } catch (const IoError& e) {
        manifest["frames_written"] = result.frames;
        manifest["error"] = e.what();
        try {
            write_text(manifest_path, manifest.dump(2) + "\n");
        } catch (const IoError&) {
        }
        throw ScenarioError(ErrorKind::io, e.what());
    }

    result.deferrals = trace.deferrals;
    result.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    manifest["status"] = "complete";
    manifest["frames_written"] = result.frames;
    manifest["dark_level"] = trace.fpn.mean;
    manifest["deferrals"] = trace.deferrals;
    manifest["wall_time_s"] = result.wall_s;
    nlohmann::json log = nlohmann::json::array();
    for (const auto& ev : trace.log) log.push_back({{"frame", ev.frame}, {"message", ev.message}});
    manifest["log"] = log;
    try {
        write_text(manifest_path, manifest.dump(2) + "\n");
    } catch (const IoError& e) {
        throw ScenarioError(ErrorKind::io, e.what());
    }
    return result;
}

}  // namespace pxa::io
