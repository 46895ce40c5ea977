#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pxa/pipeline/loop.hpp"
#include "pxa/scene/scene.hpp"

namespace pxa::io {

enum class ErrorKind { syntax, validation, gain_rule, io };

std::string_view to_string(ErrorKind k) noexcept;

// Process exit status for each error kind.
int exit_code(ErrorKind k) noexcept;

class ScenarioError : public std::runtime_error {
public:
    ScenarioError(ErrorKind kind, const std::string& message, int line = 0, int column = 0);

    ErrorKind kind() const noexcept { return kind_; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    int line_;
    int column_;
    std::string message_;
};

struct ExportToggles {
    bool frames = true;
    bool exposure = true;
    bool flow = false;
    bool metrics = true;
    bool hdr = false;
    friend bool operator==(const ExportToggles&, const ExportToggles&) = default;
};

// Comma-separated subset of frames, exposure, flow, metrics, hdr; "all" and
// "none" are accepted. Throws ContractViolation on an unknown name.
ExportToggles parse_exports(std::string_view list);
std::string print_exports(const ExportToggles& e);

struct RegionSpec {
    scene::Region region;
    std::string raster_path;  // as written in the file
    friend bool operator==(const RegionSpec&, const RegionSpec&) = default;
};

struct Scenario {
    std::string name;
    int frames = 0;
    std::uint64_t seed = 1;  // drives scene texture and sensor noise
    std::string output;      // empty: chosen by the runner
    ExportToggles exports;
    scene::SceneConfig scene;
    double background = 0.0;
    std::vector<RegionSpec> regions;
    pipeline::SystemConfig system;

    // Propagates shared values (seed, e_max, full scale) into the sub-configs.
    void normalize();
    // Throws ScenarioError (validation or gain_rule).
    void validate() const;
    scene::Scene build_scene() const;
    friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Flat `key = value` text with [scenario], [scene], [region] (repeatable),
// [sensor], [adc], [controller] and [loop] sections. '#' starts a comment.
// Raster paths are resolved against base_dir.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

// Emits every key explicitly; parse_scenario(print_scenario(s)) == s.
std::string print_scenario(const Scenario& s);

}  // namespace pxa::io
