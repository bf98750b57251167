#pragma once

#include "expforge/engine.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace expforge {

struct HypothesisConfig {
    std::string name;
    std::vector<std::vector<double>> matrix;  // |S| rows over X

    bool operator==(const HypothesisConfig&) const = default;
};

struct ThresholdConfig {
    std::vector<double> E;
    std::optional<std::vector<double>> E_R;

    bool operator==(const ThresholdConfig&) const = default;
};

struct NumericConfig {
    int grid_denominator = 1000;
    double tol = kDefaultTolerance;
    std::size_t type_cap = kDefaultTypeCap;

    bool operator==(const NumericConfig&) const = default;
};

// JSON model description:
//   {
//     "alphabet":   ["a", "b"],
//     "states":     ["s0"],                     optional, default ["s0"]
//     "hypotheses": [{"name": "H1", "matrix": [[0.9, 0.1]]}, ...],
//     "thresholds": {"E": [0.05, 0.05], "E_R": [...]},   optional
//     "numeric":    {"grid_denominator": 1000, "tol": 1e-6, "type_cap": 10000000}
//   }
struct ModelConfig {
    std::vector<std::string> alphabet;
    std::vector<std::string> states{"s0"};
    std::vector<HypothesisConfig> hypotheses;
    std::optional<ThresholdConfig> thresholds;
    NumericConfig numeric;

    bool operator==(const ModelConfig&) const = default;

    HypothesisSet hypothesis_set() const;
    // Throws ConfigError("thresholds.E required") when absent.
    ExponentSpec exponent_spec() const;
};

// Every violation is reported with its field path, e.g.
// "hypotheses[0].matrix[0]: row sums to 0.9".
ModelConfig parse_config_text(const std::string& text);
ModelConfig parse_config(const std::filesystem::path& path);
std::string serialize_config(const ModelConfig& config);

}  // namespace expforge
