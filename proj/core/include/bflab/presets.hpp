#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bflab/config.hpp"

namespace bflab {

struct ExperimentPreset {
    std::string name;
    std::string description;
    ExperimentConfig config;
};

const std::vector<ExperimentPreset>& presets();

/// Throws ValidationError("preset", ...) for an unknown name.
const ExperimentPreset& find_preset(std::string_view name);

}  // namespace bflab
