// pxa-sim: run a closed-loop adaptive-exposure scenario and export frames,
// exposure maps, flow, HDR estimates and per-frame metrics.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pxa/io/export.hpp"
#include "pxa/io/presets.hpp"
#include "pxa/io/scenario.hpp"
#include "pxa/kernels/kernels.hpp"

namespace {

constexpr int kExitContract = 6;

struct Options {
    std::string scenario_path;
    std::string preset;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> frames;
    bool worst_case_latency = false;
    std::string variant;
    bool no_median = false;
    std::string exports;
    std::optional<double> compute_us;
    bool scalar = false;
    bool print_config = false;
    bool list_presets = false;
};

pxa::io::Scenario resolve(const Options& o) {
    using namespace pxa::io;
    Scenario s = o.preset.empty() ? load_scenario(o.scenario_path) : load_preset(o.preset);
    if (o.seed) s.seed = *o.seed;
    if (o.frames) s.frames = *o.frames;
    if (o.worst_case_latency) s.system.loop.worst_case_latency = true;
    if (o.no_median) s.system.loop.median = false;
    if (o.compute_us) s.system.loop.compute_us = *o.compute_us;
    try {
        if (!o.variant.empty()) s.system.sensor.variant = pxa::sensor::variant_from_string(o.variant);
        if (!o.exports.empty()) s.exports = parse_exports(o.exports);
    } catch (const pxa::ContractViolation& e) {
        throw ScenarioError(ErrorKind::validation, e.what());
    }
    s.normalize();
    s.validate();
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-loop pixel-wise adaptive exposure simulator", "pxa-sim"};
    Options o;
    auto* source = app.add_option_group("source", "scenario to run");
    source->add_option("--scenario", o.scenario_path, "scenario config file")->check(CLI::ExistingFile);
    source->add_option("--preset", o.preset, "built-in scenario (static-hdr, instant-motion, rotate)");
    source->add_flag("--list-presets", o.list_presets, "print preset names and exit");
    source->require_option(1);
    app.add_option("--out", o.out, "output directory (default: $PXA_OUTPUT_ROOT/<name>)");
    app.add_option("--seed", o.seed, "override the scenario seed");
    app.add_option("--frames", o.frames, "override the frame count")->check(CLI::PositiveNumber);
    app.add_flag("--worst-case-latency", o.worst_case_latency, "use the 85 us link round trip");
    app.add_option("--variant", o.variant, "pixel design")->check(CLI::IsMember({"legacy", "modified"}));
    app.add_flag("--no-median", o.no_median, "skip the 3x3 median filter");
    app.add_option("--export", o.exports, "comma list of frames,exposure,flow,metrics,hdr | all | none");
    app.add_option("--compute-us", o.compute_us, "modeled controller compute time per frame")
        ->check(CLI::NonNegativeNumber);
    app.add_flag("--scalar", o.scalar, "use the scalar reference kernels");
    app.add_flag("--print-config", o.print_config, "print the resolved scenario and exit");
    CLI11_PARSE(app, argc, argv);

    if (o.list_presets) {
        for (const auto& n : pxa::io::preset_names()) std::cout << n << "\n";
        return 0;
    }
    if (o.scalar) pxa::kernels::select(pxa::kernels::Isa::scalar);

    try {
        const pxa::io::Scenario s = resolve(o);
        if (o.print_config) {
            std::cout << pxa::io::print_scenario(s);
            return 0;
        }
        std::filesystem::path out = o.out;
        if (out.empty())
            out = s.output.empty() ? pxa::io::default_output_root() / s.name
                                   : std::filesystem::path(s.output);
        const auto r = pxa::io::run_scenario(s, out);
        std::cout << s.name << ": " << r.frames << " frames -> " << r.out_dir.string() << " ("
                  << r.wall_s << " s, " << r.deferrals << " deferred maps, "
                  << pxa::kernels::to_string(pxa::kernels::active().isa) << " kernels)\n";
        return 0;
    } catch (const pxa::io::ScenarioError& e) {
        std::cerr << "pxa-sim: " << e.what() << "\n";
        return pxa::io::exit_code(e.kind());
    } catch (const pxa::ContractViolation& e) {
        std::cerr << "pxa-sim: contract violation: " << e.what() << "\n";
        return kExitContract;
    }
}
