#include "pmwls/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "config.hpp"
#include "pmwls/csv.hpp"
#include "pmwls/error.hpp"
#include "pmwls/evaluate.hpp"
#include "pmwls/presets.hpp"
#include "pmwls/simulate.hpp"
#include "pmwls/tuning.hpp"
#include "pmwls/weights.hpp"

namespace pmwls::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct FitOptions {
    std::string data;
    std::string model;
    std::string penalty = "scad";
    std::string tau = "auto";
    std::string weight = "identity";
    bool log = false;
    std::string targets;
    std::string estimator = "pmwls";
    std::string path;
    std::string out;
    double scad_a = 3.7;
    double box = 0.0;
};

struct SimOptions {
    std::string table;
    std::string config;
    std::vector<Index> sizes;
    Index reps = 100;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::string out;
    std::vector<std::string> methods;
    std::vector<double> mus;
};

struct EvalOptions {
    std::vector<std::string> trials;
    std::string model;
    bool log = false;
    std::string out;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::string penalty = "scad";
    Index restarts = 10;
    std::string subject = "subject";
};

struct WeightOptions {
    std::string kind = "ar1";
    double rho = 0.0;
    double phi = 0.0;
    Index n = 0;
    std::string out;
};

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) detail::fail_validation("cannot open '" + path + "' for writing");
    return f;
}

void write_file(const std::string& path, const std::string& text) {
    auto f = open_output(path);
    f << text;
    if (!f) detail::fail_validation("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) detail::fail_validation("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("PMWLS_SEED")) {
        try {
            std::size_t used = 0;
            const std::string text(env);
            auto v = std::stoull(text, &used);
            if (used == text.size()) return v;
        } catch (const std::exception&) {
        }
        detail::fail_validation("PMWLS_SEED must be a non-negative integer");
    }
    return 0;
}

json to_json(const Vector& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

// "auto", "auto:G" or "auto:G:floor"; a plain number otherwise.
std::optional<GridSpec> parse_tau_grid(const std::string& text, double& fixed) {
    if (text.rfind("auto", 0) != 0) {
        std::size_t used = 0;
        try {
            fixed = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size() || !(fixed >= 0.0))
            detail::fail_validation("--tau: expected a non-negative number or auto[:G[:floor]]");
        return std::nullopt;
    }
    GridSpec grid;
    std::string rest = text.substr(4);
    if (rest.empty()) return grid;
    if (rest[0] != ':') detail::fail_validation("--tau: expected auto[:G[:floor]]");
    rest = rest.substr(1);
    auto colon = rest.find(':');
    try {
        grid.count = std::stol(rest.substr(0, colon));
        if (colon != std::string::npos) grid.floor_ratio = std::stod(rest.substr(colon + 1));
    } catch (const std::exception&) {
        detail::fail_validation("--tau: expected auto[:G[:floor]]");
    }
    validate(grid);
    return grid;
}

int cmd_fit(const FitOptions& o, std::ostream& out) {
    Dataset data = read_dataset_csv(o.data, o.log);
    const ModelSpec base = model_by_name(o.model, data.dim());
    const Index n = data.size();

    Penalty pen;
    pen.family = parse_penalty_family(o.penalty);
    pen.a = o.scad_a;
    if (!o.targets.empty()) {
        pen.targets = read_vector_csv(o.targets);
        detail::require(pen.targets.size() == base.dim_theta,
                        "--targets: expected " + std::to_string(base.dim_theta) + " values, got " +
                            std::to_string(pen.targets.size()));
    }
    double fixed_tau = 0.0;
    std::optional<GridSpec> grid = parse_tau_grid(o.tau, fixed_tau);
    if (pen.family == Penalty::Family::none) grid.reset();
    pen.tau = grid ? 0.0 : fixed_tau;
    validate(pen);

    SolverConfig cfg;
    if (o.box > 0.0)
        cfg.bounds = Bounds{Vector::Constant(base.dim_theta, -o.box), Vector::Constant(base.dim_theta, o.box)};

    const Method method = parse_method(o.estimator);
    const WeightSpec wspec = parse_weight_spec(o.weight, n);
    std::optional<ObjectiveContext> ctx;
    Estimator tuning_kind = Estimator::pmwls;
    switch (method) {
        case Method::pmwls:
            ctx.emplace(data, o.log ? log_model(base) : base, build_weight(wspec), pen);
            break;
        case Method::pwls:
            ctx.emplace(make_pwls_context(data, o.log ? log_model(base) : base, wspec, pen));
            tuning_kind = Estimator::pwls;
            break;
        case Method::additive_naive:
            detail::require(o.log, "--estimator additive compares against multiplicative data; pass --log");
            detail::require(wspec.kind == WeightSpec::Kind::identity, "--estimator additive uses W = I");
            ctx.emplace(make_additive_naive_context(data, base, pen));
            break;
    }

    ordered_json doc;
    doc["estimator"] = to_string(method);
    doc["model"] = o.model;
    doc["log"] = o.log;
    doc["weight"] = to_string(wspec);
    doc["penalty"] = to_string(pen.family);

    FitResult fit;
    std::optional<TuningResult> tuned;
    if (grid) {
        tuned = select_tau(*ctx, cfg, *grid, tuning_kind);
        fit = tuned->fit;
        doc["tau"] = tuned->tau;
        doc["tau_max"] = tuned->tau_max;
    } else {
        fit = tuning_kind == Estimator::pwls ? fit_pwls(*ctx, cfg) : fit_pmwls(*ctx, cfg);
        doc["tau"] = pen.tau;
    }
    doc["theta_hat"] = to_json(fit.theta_hat);
    if (fit.beta0) doc["beta0"] = *fit.beta0;
    doc["df"] = fit.df;
    doc["S_n"] = fit.s_n;
    doc["Q_n"] = fit.q_n;
    doc["converged"] = fit.converged;
    doc["sweeps"] = fit.sweeps;
    doc["warnings"] = fit.warnings;

    if (!o.path.empty()) {
        detail::require(tuned.has_value(), "--path needs --tau auto");
        std::ostringstream csv;
        csv << "tau,bic,sigma2,df,converged\n";
        for (const auto& pt : tuned->path)
            csv << format_double(pt.tau) << ',' << format_double(pt.bic.value) << ',' << format_double(pt.bic.sigma2)
                << ',' << pt.fit.df << ',' << (pt.fit.converged ? 1 : 0) << '\n';
        write_file(o.path, csv.str());
    }
    if (!o.out.empty()) write_file(o.out, doc.dump(2) + "\n");

    out << "fit: " << doc["estimator"].get<std::string>() << " on " << n << " observations, tau = " << doc["tau"]
        << ", df = " << fit.df << ", Q_n = " << fit.q_n << (fit.converged ? "" : " (not converged)") << '\n';
    for (const auto& w : fit.warnings) out << "warning: " << w << '\n';
    return fit.converged ? ok : numerical_failure;
}

bool keep_estimator(const EstimatorSpec& est, const std::vector<std::string>& methods) {
    if (methods.empty()) return true;
    for (const auto& m : methods)
        if (parse_method(m) == est.method) return true;
    return false;
}

int cmd_sim(const SimOptions& o, std::ostream& out) {
    ExperimentConfig exp;
    if (!o.config.empty()) {
        exp = parse_experiment(read_file(o.config), o.config);
        if (o.seed)
            for (auto& cell : exp.cells) cell.seed = *o.seed;
    } else {
        detail::require(!o.table.empty(), "sim needs --table or --config");
        const std::vector<Index> sizes = o.sizes.empty() ? std::vector<Index>{50, 100, 200} : o.sizes;
        exp.name = o.table;
        exp.cells = expand_preset(table_preset(o.table), sizes, o.reps, resolve_seed(o.seed));
    }

    std::vector<SimConfig> cells;
    for (auto cell : exp.cells) {
        if (!o.mus.empty() && std::find(o.mus.begin(), o.mus.end(), cell.error.mu) == o.mus.end()) continue;
        std::vector<EstimatorSpec> kept;
        for (const auto& est : cell.estimators)
            if (keep_estimator(est, o.methods)) kept.push_back(est);
        if (kept.empty()) continue;
        cell.estimators = std::move(kept);
        cells.push_back(std::move(cell));
    }
    detail::require(!cells.empty(), "the --method / --mu filters leave nothing to run");

    std::ostringstream csv;
    write_metrics_header(csv);
    Index aborted = 0;
    for (const auto& cell : cells) {
        auto start = std::chrono::steady_clock::now();
        MetricsTable table = run_experiment(cell, o.threads);
        std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        write_metrics_rows(csv, exp.name, table);
        Index failures = 0;
        for (const auto& row : table.rows) {
            failures += row.failures;
            if (row.aborted) ++aborted;
        }
        out << exp.name << ": mu = " << cell.error.mu << ", sigma = " << cell.error.sigma << ", n = " << cell.n
            << ", " << table.rows.size() << " estimators x " << cell.reps << " reps, " << failures << " failed fits, "
            << std::fixed << std::setprecision(1) << took.count() << " s\n"
            << std::defaultfloat;
    }
    if (!o.out.empty()) {
        write_file(o.out, csv.str());
        out << "wrote " << o.out << '\n';
    }
    if (aborted > 0) {
        out << aborted << " cell(s) aborted after more than 10% failed replications\n";
        return numerical_failure;
    }
    return ok;
}

int cmd_eval(const EvalOptions& o, std::ostream& out) {
    detail::require(o.trials.size() >= 2, "--trials needs at least two files");
    TrialSet set;
    set.subject = o.subject;
    for (const auto& path : o.trials) set.trials.push_back(read_dataset_csv(path, o.log));
    const Index d = set.trials.front().dim();
    for (const auto& t : set.trials) detail::require(t.dim() == d, "all trials must have the same covariates");

    PipelineConfig cfg;
    cfg.base_model = model_by_name(o.model, d);
    cfg.penalty = parse_penalty_family(o.penalty);
    cfg.restarts = o.restarts;
    cfg.seed = resolve_seed(o.seed);
    cfg.threads = o.threads;
    VafReport report = train_test_eval(set, cfg);

    ordered_json doc;
    doc["subject"] = report.subject;
    doc["model"] = o.model;
    doc["log"] = o.log;
    doc["seed"] = cfg.seed;
    ordered_json trials = ordered_json::array();
    for (const auto& tr : report.trials) {
        ordered_json t;
        t["train"] = tr.train + 1;
        t["failed"] = tr.failed;
        if (!tr.note.empty()) t["note"] = tr.note;
        t["rho"] = tr.weight.rho;
        t["phi"] = tr.weight.phi;
        t["arma_boundary"] = tr.weight.boundary;
        t["tau"] = tr.tau;
        t["df"] = tr.df;
        t["theta_hat"] = to_json(tr.theta_hat);
        t["theta_tilde"] = to_json(tr.theta_tilde);
        t["train_vaf"] = tr.train_vaf;
        ordered_json tests = ordered_json::array();
        for (const auto& [idx, v] : tr.test_vafs) tests.push_back(ordered_json{{"trial", idx + 1}, {"vaf", v}});
        t["test_vaf"] = tests;
        trials.push_back(t);
    }
    doc["trials"] = trials;
    doc["average_train_vaf"] = report.average_train;
    doc["average_test_vaf"] = report.average_test;
    if (!o.out.empty()) write_file(o.out, doc.dump(2) + "\n");

    Index failed = 0;
    for (const auto& tr : report.trials) {
        out << "train on trial " << tr.train + 1 << ": ";
        if (tr.failed) {
            ++failed;
            out << "failed (" << tr.note << ")\n";
            continue;
        }
        out << "VAF " << tr.train_vaf << ", weight arma11(" << tr.weight.rho << ", " << tr.weight.phi << "), df "
            << tr.df << '\n';
    }
    out << "average VAF: train " << report.average_train << ", test " << report.average_test << '\n';
    return failed == static_cast<Index>(report.trials.size()) ? numerical_failure : ok;
}

int cmd_weights(const WeightOptions& o, std::ostream& out) {
    WeightSpec spec;
    if (o.kind == "identity") spec = WeightSpec::identity(o.n);
    else if (o.kind == "ar1") spec = WeightSpec::ar1(o.rho, o.n);
    else if (o.kind == "arma11") spec = WeightSpec::arma11(o.rho, o.phi, o.n);
    else detail::fail_validation("--kind: expected identity, ar1 or arma11");
    const WeightMatrix wm = build_weight(spec);
    const WeightDiagnostic diag = assumption_ratio(wm);
    if (!o.out.empty()) {
        std::ostringstream csv;
        write_matrix_csv(csv, wm.w);
        write_file(o.out, csv.str());
    }
    out << to_string(spec) << " n = " << o.n << ": ratio ||W||_1 ||W||_inf / lambda_w = " << diag.ratio
        << ", lambda_w = " << diag.lambda_w << '\n';
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Penalized modified weighted least squares for nonlinear regression with dependent errors", "pmwls"};
    app.require_subcommand(1);

    FitOptions fo;
    auto* fit = app.add_subcommand("fit", "Fit one dataset");
    fit->add_option("--data", fo.data, "CSV with header y,x1..xd")->required();
    fit->add_option("--model", fo.model, "Mean model: logistic or linear")->required();
    fit->add_option("--penalty", fo.penalty, "none, lasso or scad")->capture_default_str();
    fit->add_option("--tau", fo.tau, "Penalty level, or auto[:G[:floor]] for BIC selection")->capture_default_str();
    fit->add_option("--weight", fo.weight, "identity, ar1:RHO or arma11:RHO:PHI")->capture_default_str();
    fit->add_flag("--log", fo.log, "Responses are multiplicative; fit their logs");
    fit->add_option("--targets", fo.targets, "CSV of typical values the penalty shrinks toward");
    fit->add_option("--estimator", fo.estimator, "pmwls, pwls or additive")->capture_default_str();
    fit->add_option("--path", fo.path, "Write the tau path (tau,bic,sigma2,df,converged) as CSV");
    fit->add_option("--out", fo.out, "Write the fit as JSON");
    fit->add_option("--scad-a", fo.scad_a, "SCAD constant")->capture_default_str();
    fit->add_option("--box", fo.box, "Bound every |theta_i| by this value (0: unbounded)")->capture_default_str();

    SimOptions so;
    std::uint64_t sim_seed = 0;
    auto* sim = app.add_subcommand("sim", "Run a Monte Carlo simulation table");
    sim->add_option("--table", so.table, "Preset name, e.g. add_scad_5");
    sim->add_option("--config", so.config, "JSON experiment configuration");
    sim->add_option("--n", so.sizes, "Sample sizes")->delimiter(',');
    sim->add_option("--reps", so.reps, "Replications per cell")->capture_default_str();
    auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "Master seed (default: $PMWLS_SEED or 0)");
    sim->add_option("--threads", so.threads, "Worker threads (0: all cores)")->capture_default_str();
    sim->add_option("--out", so.out, "Write the metrics table as CSV");
    sim->add_option("--method", so.methods, "Keep only these methods (pmwls, pwls, additive)")->delimiter(',');
    sim->add_option("--mu", so.mus, "Keep only these error means")->delimiter(',');

    EvalOptions eo;
    std::uint64_t eval_seed = 0;
    auto* eval = app.add_subcommand("eval", "Train/test evaluation over the trials of one subject");
    eval->add_option("--trials", eo.trials, "Trial CSV files")->required()->expected(2, 1000);
    eval->add_option("--model", eo.model, "Mean model: logistic or linear")->required();
    eval->add_flag("--log", eo.log, "Responses are multiplicative; fit their logs");
    eval->add_option("--out", eo.out, "Write the report as JSON");
    auto* eval_seed_opt = eval->add_option("--seed", eval_seed, "Seed for the restarts (default: $PMWLS_SEED or 0)");
    eval->add_option("--threads", eo.threads, "Worker threads (0: all cores)")->capture_default_str();
    eval->add_option("--penalty", eo.penalty, "lasso or scad")->capture_default_str();
    eval->add_option("--restarts", eo.restarts, "Pre-estimations averaged into the typical values")
        ->capture_default_str();
    eval->add_option("--subject", eo.subject, "Subject label for the report")->capture_default_str();

    WeightOptions wo;
    auto* weights = app.add_subcommand("weights", "Build a weight matrix W");
    weights->add_option("--kind", wo.kind, "identity, ar1 or arma11")->capture_default_str();
    weights->add_option("--rho", wo.rho, "AR coefficient");
    weights->add_option("--phi", wo.phi, "MA coefficient");
    weights->add_option("--n", wo.n, "Matrix size")->required();
    weights->add_option("--out", wo.out, "Write W as CSV");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            for (const auto* sub : app.get_subcommands()) out << sub->help();
            if (app.get_subcommands().empty()) out << app.help();
            return ok;
        }
        err << "error: " << e.what() << "\n\n";
        const CLI::App* shown = &app;
        for (const auto* sub : {fit, sim, eval, weights})
            if (sub->parsed()) shown = sub;
        err << shown->help();
        return validation_failure;
    }

    try {
        if (fit->parsed()) return cmd_fit(fo, out);
        if (sim->parsed()) {
            if (*sim_seed_opt) so.seed = sim_seed;
            return cmd_sim(so, out);
        }
        if (eval->parsed()) {
            if (*eval_seed_opt) eo.seed = eval_seed;
            return cmd_eval(eo, out);
        }
        return cmd_weights(wo, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return validation_failure;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    }
}

}  // namespace pmwls::cli
