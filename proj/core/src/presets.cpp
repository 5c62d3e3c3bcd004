#include "pmwls/presets.hpp"

#include "pmwls/error.hpp"

namespace pmwls {

namespace {

struct ProcessCode {
    const char* suffix;
    ErrorProcessSpec::Family family;
    double rho;
    double phi;
};

constexpr ProcessCode kProcesses[] = {
    {"5", ErrorProcessSpec::Family::ar1, 0.5, 0.0},
    {"9", ErrorProcessSpec::Family::ar1, 0.9, 0.0},
    {"8_4", ErrorProcessSpec::Family::arma11, 0.8, 0.4},
};

std::vector<WeightSpec> weight_rows() {
    return {WeightSpec::identity(0), WeightSpec::ar1(0.5, 0), WeightSpec::ar1(0.9, 0),
            WeightSpec::arma11(0.8, 0.4, 0)};
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const char* prefix : {"add_scad_", "add_lasso_", "multi_scad_", "multi_lasso_", "multi_add_"})
        for (const auto& p : kProcesses) names.push_back(std::string(prefix) + p.suffix);
    return names;
}

TablePreset table_preset(const std::string& name) {
    TablePreset preset;
    preset.name = name;
    std::string rest;
    bool comparator = false;
    if (name.rfind("add_", 0) == 0) {
        preset.form = ModelForm::additive;
        rest = name.substr(4);
    } else if (name.rfind("multi_add_", 0) == 0) {
        preset.form = ModelForm::multiplicative;
        comparator = true;
        rest = "scad_" + name.substr(10);
    } else if (name.rfind("multi_", 0) == 0) {
        preset.form = ModelForm::multiplicative;
        rest = name.substr(6);
    } else {
        detail::fail_validation("unknown table '" + name + "'");
    }

    std::string code;
    if (rest.rfind("scad_", 0) == 0) {
        preset.penalty = Penalty::Family::scad;
        code = rest.substr(5);
    } else if (rest.rfind("lasso_", 0) == 0) {
        preset.penalty = Penalty::Family::lasso;
        code = rest.substr(6);
    } else {
        detail::fail_validation("unknown table '" + name + "'");
    }

    bool found = false;
    for (const auto& p : kProcesses) {
        if (code == p.suffix) {
            preset.error.family = p.family;
            preset.error.rho = p.rho;
            preset.error.phi = p.phi;
            found = true;
        }
    }
    if (!found) detail::fail_validation("unknown table '" + name + "'");
    preset.error.exponentiate = preset.form == ModelForm::multiplicative;
    preset.blocks = {{0.1, 0.5}, {0.5, 0.5}};

    if (comparator) {
        preset.estimators.push_back({Method::pmwls, WeightSpec::identity(0), preset.penalty, ""});
        preset.estimators.push_back({Method::additive_naive, WeightSpec::identity(0), preset.penalty, ""});
    } else {
        for (Method m : {Method::pmwls, Method::pwls})
            for (const auto& w : weight_rows()) preset.estimators.push_back({m, w, preset.penalty, ""});
    }
    for (auto& est : preset.estimators) est.label = default_label(est);
    return preset;
}

std::vector<SimConfig> expand_preset(const TablePreset& preset, const std::vector<Index>& sizes, Index reps,
                                     std::uint64_t seed) {
    std::vector<SimConfig> out;
    for (const auto& [mu, sigma] : preset.blocks) {
        for (Index n : sizes) {
            SimConfig cfg;
            cfg.n = n;
            cfg.reps = reps;
            cfg.seed = seed;
            cfg.form = preset.form;
            cfg.error = preset.error;
            cfg.error.mu = mu;
            cfg.error.sigma = sigma;
            cfg.estimators = preset.estimators;
            if (preset.box > 0.0)
                cfg.solver.bounds = Bounds{Vector::Constant(cfg.d, -preset.box), Vector::Constant(cfg.d, preset.box)};
            validate(cfg);
            out.push_back(std::move(cfg));
        }
    }
    return out;
}

}  // namespace pmwls
