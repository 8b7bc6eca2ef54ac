#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dbarlab {

struct Preset {
    std::string name;
    /// The result the preset exercises, in words.
    std::string theorem;
    /// TOML source.
    std::string text;
};

/// Bundled presets, one per result (the validate suite is separate).
const std::vector<Preset>& presets();

/// Throws ConfigError for unknown names. "validate" is accepted as well.
const Preset& find_preset(std::string_view name);

/// The invariant-suite config.
const Preset& validate_preset();

/// Result label for an experiment kind (and dimension, for solves).
std::string theorem_label(const std::string& kind, int n);

}  // namespace dbarlab
