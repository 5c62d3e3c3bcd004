#pragma once

#include <string>
#include <vector>

#include "pmwls/simulate.hpp"

namespace pmwls::cli {

inline constexpr int config_version = 1;

/// A simulation experiment: one SimConfig per (mu, sigma, n) cell, in output order.
struct ExperimentConfig {
    std::string name;
    std::vector<SimConfig> cells;
};

/// Parses the JSON experiment document. Either `table` names a preset whose fields the
/// remaining keys override, or `error` and `estimators` describe the design directly.
/// Unknown keys and a missing or unsupported `version` are validation errors.
ExperimentConfig parse_experiment(const std::string& text, const std::string& source);

Method parse_method(const std::string& name);
std::string to_string(Method method);

}  // namespace pmwls::cli
