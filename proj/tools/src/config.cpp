#include "config.hpp"

#include <algorithm>
#include <initializer_list>

#include <nlohmann/json.hpp>

#include "pmwls/error.hpp"
#include "pmwls/presets.hpp"

namespace pmwls::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) detail::fail_validation(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!known) detail::fail_validation(where + ": unknown key '" + key + "'");
    }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        detail::fail_validation(where + "." + key + ": missing or of the wrong type");
    }
}

Index get_index(const json& obj, const char* key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_number_integer()) detail::fail_validation(where + "." + key + ": expected an integer");
    return v.get<Index>();
}

std::vector<Index> sizes_of(const json& v, const std::string& where) {
    std::vector<Index> out;
    if (v.is_number_integer()) {
        out.push_back(v.get<Index>());
    } else if (v.is_array()) {
        for (const auto& e : v) {
            if (!e.is_number_integer()) detail::fail_validation(where + ".n: expected integers");
            out.push_back(e.get<Index>());
        }
    } else {
        detail::fail_validation(where + ".n: expected an integer or a list of integers");
    }
    detail::require(!out.empty(), where + ".n: empty list");
    return out;
}

Vector vector_of(const json& v, const std::string& where) {
    if (!v.is_array()) detail::fail_validation(where + ": expected a list of numbers");
    Vector out(static_cast<Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) detail::fail_validation(where + ": expected a list of numbers");
        out(static_cast<Index>(i)) = v[i].get<double>();
    }
    return out;
}

ErrorProcessSpec::Family parse_family(const std::string& name) {
    if (name == "ar1") return ErrorProcessSpec::Family::ar1;
    if (name == "arma11") return ErrorProcessSpec::Family::arma11;
    detail::fail_validation("unknown error family '" + name + "' (expected ar1 or arma11)");
}

void apply_error(const json& e, ErrorProcessSpec& spec, const std::string& where) {
    check_keys(e, where, {"family", "rho", "phi", "mu", "sigma"});
    if (e.contains("family")) spec.family = parse_family(get<std::string>(e, "family", where));
    if (e.contains("rho")) spec.rho = get<double>(e, "rho", where);
    if (e.contains("phi")) spec.phi = get<double>(e, "phi", where);
    if (e.contains("mu")) spec.mu = get<double>(e, "mu", where);
    if (e.contains("sigma")) spec.sigma = get<double>(e, "sigma", where);
}

std::vector<EstimatorSpec> parse_estimators(const json& v, Penalty::Family default_penalty) {
    if (!v.is_array() || v.empty()) detail::fail_validation("estimators: expected a non-empty list");
    std::vector<EstimatorSpec> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string where = "estimators[" + std::to_string(i) + "]";
        check_keys(v[i], where, {"method", "weight", "penalty", "label"});
        EstimatorSpec est;
        est.penalty = default_penalty;
        est.method = parse_method(get<std::string>(v[i], "method", where));
        if (v[i].contains("weight")) est.weight = parse_weight_spec(get<std::string>(v[i], "weight", where));
        if (v[i].contains("penalty")) est.penalty = parse_penalty_family(get<std::string>(v[i], "penalty", where));
        est.label = v[i].contains("label") ? get<std::string>(v[i], "label", where) : default_label(est);
        out.push_back(std::move(est));
    }
    return out;
}

void apply_grid(const json& g, GridSpec& grid) {
    check_keys(g, "grid", {"count", "floor_ratio", "taus"});
    if (g.contains("count")) grid.count = get_index(g, "count", "grid");
    if (g.contains("floor_ratio")) grid.floor_ratio = get<double>(g, "floor_ratio", "grid");
    if (g.contains("taus")) {
        Vector t = vector_of(g.at("taus"), "grid.taus");
        grid.taus.assign(t.data(), t.data() + t.size());
    }
}

void apply_solver(const json& s, SolverConfig& cfg, Index d) {
    check_keys(s, "solver", {"max_sweeps", "tol_theta", "tol_obj", "max_halvings", "box"});
    if (s.contains("max_sweeps")) cfg.max_sweeps = static_cast<int>(get_index(s, "max_sweeps", "solver"));
    if (s.contains("tol_theta")) cfg.tol_theta = get<double>(s, "tol_theta", "solver");
    if (s.contains("tol_obj")) cfg.tol_obj = get<double>(s, "tol_obj", "solver");
    if (s.contains("max_halvings")) cfg.max_halvings = static_cast<int>(get_index(s, "max_halvings", "solver"));
    if (s.contains("box")) {
        if (s.at("box").is_null()) {
            cfg.bounds.reset();
        } else {
            double box = get<double>(s, "box", "solver");
            detail::require(box > 0.0, "solver.box must be positive or null");
            cfg.bounds = Bounds{Vector::Constant(d, -box), Vector::Constant(d, box)};
        }
    }
}

}  // namespace

Method parse_method(const std::string& name) {
    if (name == "pmwls") return Method::pmwls;
    if (name == "pwls") return Method::pwls;
    if (name == "additive") return Method::additive_naive;
    detail::fail_validation("unknown method '" + name + "' (expected pmwls, pwls or additive)");
}

std::string to_string(Method method) {
    switch (method) {
        case Method::pmwls:
            return "pmwls";
        case Method::pwls:
            return "pwls";
        case Method::additive_naive:
            return "additive";
    }
    return "pmwls";
}

ExperimentConfig parse_experiment(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        detail::fail_validation(source + ": " + e.what());
    }
    check_keys(doc, source, {"version", "name", "table", "seed", "reps", "n", "d", "s", "theta0", "form", "error",
                             "estimators", "penalty", "grid", "solver", "scad_a"});
    if (!doc.contains("version")) detail::fail_validation(source + ": missing 'version'");
    if (get_index(doc, "version", source) != config_version)
        detail::fail_validation(source + ": unsupported version (expected " + std::to_string(config_version) + ")");
    if (!doc.contains("seed") || !doc.at("seed").is_number_unsigned())
        detail::fail_validation(source + ": 'seed' must be a non-negative integer");

    TablePreset preset;
    if (doc.contains("table")) {
        preset = table_preset(get<std::string>(doc, "table", source));
    } else {
        if (!doc.contains("error") || !doc.contains("estimators"))
            detail::fail_validation(source + ": without 'table', both 'error' and 'estimators' are required");
        preset.name = "custom";
        preset.box = 0.0;
    }

    ExperimentConfig out;
    out.name = doc.contains("name") ? get<std::string>(doc, "name", source) : preset.name;
    if (doc.contains("penalty")) preset.penalty = parse_penalty_family(get<std::string>(doc, "penalty", source));
    if (doc.contains("form")) {
        std::string form = get<std::string>(doc, "form", source);
        if (form == "additive") preset.form = ModelForm::additive;
        else if (form == "multiplicative") preset.form = ModelForm::multiplicative;
        else detail::fail_validation("form: expected additive or multiplicative");
    }
    if (doc.contains("error")) {
        const json& e = doc.at("error");
        apply_error(e, preset.error, "error");
        if (e.contains("mu") || e.contains("sigma") || preset.blocks.empty())
            preset.blocks = {{preset.error.mu, preset.error.sigma}};
    }
    if (doc.contains("estimators")) {
        preset.estimators = parse_estimators(doc.at("estimators"), preset.penalty);
    } else if (doc.contains("penalty")) {
        for (auto& est : preset.estimators) est.penalty = preset.penalty;
    }

    const std::vector<Index> sizes =
        doc.contains("n") ? sizes_of(doc.at("n"), source) : std::vector<Index>{50, 100, 200};
    const Index reps = doc.contains("reps") ? get_index(doc, "reps", source) : 100;
    const auto seed = doc.at("seed").get<std::uint64_t>();

    const Index d = doc.contains("d") ? get_index(doc, "d", source) : 20;
    preset.box = doc.contains("solver") && doc.at("solver").contains("box") ? 0.0 : preset.box;
    out.cells = expand_preset(preset, sizes, reps, seed);
    for (auto& cell : out.cells) {
        cell.d = d;
        if (doc.contains("s")) cell.s = get_index(doc, "s", source);
        if (doc.contains("theta0")) cell.theta0 = vector_of(doc.at("theta0"), "theta0");
        if (doc.contains("scad_a")) cell.scad_a = get<double>(doc, "scad_a", source);
        if (doc.contains("grid")) apply_grid(doc.at("grid"), cell.grid);
        if (cell.solver.bounds && cell.solver.bounds->lower.size() != d) {
            const double box = cell.solver.bounds->upper(0);
            cell.solver.bounds = Bounds{Vector::Constant(d, -box), Vector::Constant(d, box)};
        }
        if (doc.contains("solver")) apply_solver(doc.at("solver"), cell.solver, d);
        validate(cell);
    }
    return out;
}

}  // namespace pmwls::cli
