#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pxa/io/scenario.hpp"

namespace pxa::io {

// Built-in scenarios: static-hdr, instant-motion, rotate.
std::vector<std::string> preset_names();

// Config text of a preset; throws ScenarioError (validation) if unknown.
std::string_view preset_text(std::string_view name);

Scenario load_preset(std::string_view name);

}  // namespace pxa::io
