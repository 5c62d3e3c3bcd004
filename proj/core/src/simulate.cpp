#include "pmwls/simulate.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "pmwls/error.hpp"
#include "pmwls/parallel.hpp"

namespace pmwls {

void validate(const ErrorProcessSpec& spec) {
    detail::require(std::abs(spec.rho) < 1.0, "error process needs |rho| < 1");
    detail::require(std::abs(spec.phi) < 1.0, "error process needs |phi| < 1");
    detail::require(spec.sigma > 0.0 && std::isfinite(spec.sigma), "error process needs sigma > 0");
    detail::require(std::isfinite(spec.mu), "error process mean must be finite");
}

std::string default_label(const EstimatorSpec& est) {
    std::ostringstream out;
    switch (est.method) {
        case Method::pmwls: out << "PMWLS"; break;
        case Method::pwls: out << "PWLS"; break;
        case Method::additive_naive: return "Additive";
    }
    switch (est.weight.kind) {
        case WeightSpec::Kind::identity: break;
        case WeightSpec::Kind::ar1: out << " (rho=" << est.weight.rho << ')'; break;
        case WeightSpec::Kind::arma11:
            out << " (rho=" << est.weight.rho << ",phi=" << est.weight.phi << ')';
            break;
    }
    return out.str();
}

Vector default_theta0(Index d) {
    detail::require(d >= 3, "the default theta0 needs d >= 3");
    Vector theta = Vector::Zero(d);
    theta(0) = 1.0;
    theta(1) = 1.2;
    theta(2) = 0.6;
    return theta;
}

Vector resolved_theta0(const SimConfig& cfg) {
    return cfg.theta0.size() == 0 ? default_theta0(cfg.d) : cfg.theta0;
}

void validate(const SimConfig& cfg) {
    detail::require(cfg.n >= 2, "simulation needs n >= 2");
    detail::require(cfg.reps >= 1, "simulation needs at least one replication");
    detail::require(cfg.d >= 2, "simulation needs d >= 2");
    const Vector theta0 = resolved_theta0(cfg);
    detail::require(theta0.size() == cfg.d, "theta0 length must equal d");
    detail::require(cfg.s >= 0 && cfg.s <= cfg.d, "s must lie in [0, d]");
    validate(cfg.error);
    validate(cfg.grid);
    validate(cfg.solver);
    detail::require(cfg.scad_a > 2.0, "SCAD constant must exceed 2");
    for (const auto& est : cfg.estimators) {
        WeightSpec w = est.weight;
        w.n = cfg.n;
        validate(w);
        if (est.method == Method::additive_naive)
            detail::require(cfg.form == ModelForm::multiplicative,
                            "the additive comparator only applies to multiplicative data");
    }
}

RowMatrix gen_covariates(Index n, Index d, Rng& rng) {
    detail::require(d >= 2, "covariates need d >= 2");
    const Index m = d - 1;
    Matrix cov = Matrix::Constant(m, m, 0.1);
    cov.diagonal().setConstant(0.6);
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) detail::fail_numerical("covariate covariance is not positive definite");
    const Matrix chol = llt.matrixL();

    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::normal_distribution<double> norm(0.0, 1.0);
    RowMatrix x(n, d);
    Vector z(m);
    for (Index t = 0; t < n; ++t) {
        x(t, 0) = unif(rng);
        for (Index j = 0; j < m; ++j) z(j) = norm(rng);
        x.row(t).tail(m) = (chol * z).transpose();
    }
    return x;
}

Vector gen_errors(const ErrorProcessSpec& spec, Index n, Rng& rng) {
    validate(spec);
    std::normal_distribution<double> norm(0.0, 1.0);
    Vector e(n);
    if (spec.family == ErrorProcessSpec::Family::ar1) {
        const double innov_sd = spec.sigma * std::sqrt(1.0 - spec.rho * spec.rho);
        double x = spec.sigma * norm(rng);
        for (Index t = 0; t < n; ++t) {
            if (t > 0) x = spec.rho * x + innov_sd * norm(rng);
            e(t) = x;
        }
    } else {
        constexpr Index burn_in = 1000;
        const double innov_sd = std::sqrt(arma_innovation_variance(spec.rho, spec.phi, spec.sigma));
        double x = 0.0;
        double u_prev = 0.0;
        for (Index t = -burn_in; t < n; ++t) {
            const double u = innov_sd * norm(rng);
            x = spec.rho * x + u + spec.phi * u_prev;
            u_prev = u;
            if (t >= 0) e(t) = x;
        }
    }
    e.array() += spec.mu;
    if (spec.exponentiate) e = e.array().exp().matrix();
    return e;
}

ModelSpec fitted_model(const SimConfig& cfg) {
    ModelSpec base = logistic_model(cfg.d);
    return cfg.form == ModelForm::multiplicative ? log_model(std::move(base)) : base;
}

SimulatedData gen_dataset(const SimConfig& cfg, Index rep) {
    detail::require(rep >= 0 && rep < cfg.reps, "replication index out of range");
    const Vector theta0 = resolved_theta0(cfg);
    Rng cov_rng = make_rng(cfg.seed, static_cast<std::uint64_t>(rep), Stream::covariates);
    Rng err_rng = make_rng(cfg.seed, static_cast<std::uint64_t>(rep), Stream::errors);

    RowMatrix x = gen_covariates(cfg.n, cfg.d, cov_rng);
    ErrorProcessSpec process = cfg.error;
    process.exponentiate = false;
    Vector eps = gen_errors(process, cfg.n, err_rng);

    SimulatedData sim;
    const ModelSpec f = logistic_model(cfg.d);
    sim.mean.resize(cfg.n);
    for (Index t = 0; t < cfg.n; ++t) sim.mean(t) = f.eval(x.row(t), theta0);
    sim.log_error = eps;
    if (cfg.form == ModelForm::additive) {
        sim.data = make_dataset(sim.mean + eps, std::move(x), false);
    } else {
        Vector z = sim.mean.array() * eps.array().exp();
        if (!((z.array() > 0.0).all())) detail::fail_numerical("multiplicative response is not positive");
        sim.data = make_dataset(std::move(z), std::move(x), true);
    }
    return sim;
}

FitResult estimate(const EstimatorSpec& est, const SimulatedData& sim, const SimConfig& cfg) {
    Penalty pen;
    pen.family = est.penalty;
    pen.a = cfg.scad_a;
    pen.tau = 0.0;
    WeightSpec weight = est.weight;
    weight.n = sim.data.size();

    auto run = [&](const ObjectiveContext& ctx, Estimator which) {
        if (pen.family == Penalty::Family::none)
            return which == Estimator::pwls ? fit_pwls(ctx, cfg.solver) : fit_pmwls(ctx, cfg.solver);
        return select_tau(ctx, cfg.solver, cfg.grid, which).fit;
    };

    switch (est.method) {
        case Method::pmwls:
            return run(ObjectiveContext(sim.data, fitted_model(cfg), build_weight(weight), pen), Estimator::pmwls);
        case Method::pwls:
            return run(make_pwls_context(sim.data, fitted_model(cfg), weight, pen), Estimator::pwls);
        case Method::additive_naive:
            return run(make_additive_naive_context(sim.data, logistic_model(cfg.d), pen), Estimator::pmwls);
    }
    detail::fail_validation("unknown estimator");
}

MetricsRow metrics(const std::vector<Vector>& estimates, const Vector& theta0, const Vector& targets, Index s,
                   double threshold) {
    const Index p = theta0.size();
    detail::require(!estimates.empty(), "metrics need at least one estimate");
    detail::require(targets.size() == 0 || targets.size() == p, "targets length does not match theta0");
    detail::require(s >= 0 && s <= p, "s must lie in [0, p]");
    for (const auto& est : estimates) detail::require(est.size() == p, "estimate length does not match theta0");

    const double reps = static_cast<double>(estimates.size());
    Vector mean = Vector::Zero(p);
    double sq_err = 0.0;
    double tp = 0.0;
    double tn = 0.0;
    for (const auto& est : estimates) {
        mean += est;
        sq_err += (est - theta0).squaredNorm();
        for (Index i = 0; i < p; ++i) {
            const double target = targets.size() == 0 ? 0.0 : targets(i);
            const bool significant = std::abs(est(i) - target) > threshold;
            if (i < s && significant) tp += 1.0;
            if (i >= s && !significant) tn += 1.0;
        }
    }
    mean /= reps;

    MetricsRow row;
    row.reps_used = static_cast<Index>(estimates.size());
    row.mse = sq_err / (reps * static_cast<double>(p));
    if (estimates.size() >= 2) {
        double dev = 0.0;
        for (const auto& est : estimates) dev += (est - mean).squaredNorm();
        row.sd = std::sqrt(dev / (reps - 1.0));
    } else {
        row.sd = std::numeric_limits<double>::quiet_NaN();
    }
    row.tp = tp / reps;
    row.tn = tn / reps;
    return row;
}

MetricsTable run_experiment(const SimConfig& cfg, unsigned threads) {
    validate(cfg);
    const Vector theta0 = resolved_theta0(cfg);
    const std::size_t cells = cfg.estimators.size();
    const std::size_t reps = static_cast<std::size_t>(cfg.reps);

    // estimates[cell][rep]; empty optional marks a failed fit.
    std::vector<std::vector<std::optional<Vector>>> estimates(cells, std::vector<std::optional<Vector>>(reps));
    parallel_for(reps, threads, [&](std::size_t rep) {
        const SimulatedData sim = gen_dataset(cfg, static_cast<Index>(rep));
        for (std::size_t c = 0; c < cells; ++c) {
            try {
                estimates[c][rep] = estimate(cfg.estimators[c], sim, cfg).theta_hat;
            } catch (const NumericalError&) {
                estimates[c][rep].reset();
            }
        }
    });

    MetricsTable table;
    for (std::size_t c = 0; c < cells; ++c) {
        std::vector<Vector> ok;
        Index failures = 0;
        for (auto& est : estimates[c]) {
            if (est)
                ok.push_back(*est);
            else
                ++failures;
        }
        MetricsRow row;
        const bool aborted = static_cast<double>(failures) > 0.1 * static_cast<double>(reps) || ok.empty();
        if (!aborted) {
            row = metrics(ok, theta0, Vector(), cfg.s);
        } else {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.mse = row.sd = row.tp = row.tn = nan;
            row.reps_used = static_cast<Index>(ok.size());
        }
        const EstimatorSpec& est = cfg.estimators[c];
        row.label = est.label.empty() ? default_label(est) : est.label;
        row.n = cfg.n;
        row.mu = cfg.error.mu;
        row.sigma = cfg.error.sigma;
        row.failures = failures;
        row.aborted = aborted;
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_metrics_header(std::ostream& out) {
    out << "table,mu,sigma,method,n,reps,failures,mse,sd,tp,tn\n";
}

namespace {

std::string format_value(double v) {
    if (std::isnan(v)) return "NA";
    std::ostringstream out;
    out << std::setprecision(10) << v;
    return out.str();
}

}  // namespace

void write_metrics_rows(std::ostream& out, const std::string& table, const MetricsTable& rows) {
    for (const auto& row : rows.rows) {
        out << table << ',' << format_value(row.mu) << ',' << format_value(row.sigma) << ",\"" << row.label
            << "\"," << row.n << ',' << row.reps_used << ',' << row.failures << ',' << format_value(row.mse) << ','
            << format_value(row.sd) << ',' << format_value(row.tp) << ',' << format_value(row.tn) << '\n';
    }
}

}  // namespace pmwls
