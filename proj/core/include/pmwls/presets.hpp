#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pmwls/simulate.hpp"

namespace pmwls {

/// A results table of the simulation study: error process, penalty, the (mu, sigma)
/// blocks and the estimator rows.
struct TablePreset {
    std::string name;
    ModelForm form = ModelForm::additive;
    ErrorProcessSpec error;  // mu and sigma come from `blocks`
    Penalty::Family penalty = Penalty::Family::scad;
    std::vector<std::pair<double, double>> blocks;
    std::vector<EstimatorSpec> estimators;
    double box = 5.0;  // |theta_i| <= box; 0 leaves theta unbounded
};

/// Known names: {add,multi}_{scad,lasso}_{5,9,8_4} and multi_add_{5,9,8_4}; the suffix
/// names the error process (AR(1) rho = 0.5, rho = 0.9, ARMA(1,1) rho = 0.8, phi = 0.4).
TablePreset table_preset(const std::string& name);
std::vector<std::string> preset_names();

/// One SimConfig per (block, n) in table order.
std::vector<SimConfig> expand_preset(const TablePreset& preset, const std::vector<Index>& sizes, Index reps,
                                     std::uint64_t seed);

}  // namespace pmwls
