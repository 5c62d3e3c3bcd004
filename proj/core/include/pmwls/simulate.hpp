#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pmwls/model.hpp"
#include "pmwls/rng.hpp"
#include "pmwls/tuning.hpp"
#include "pmwls/weights.hpp"

namespace pmwls {

/// Stationary AR(1)/ARMA(1,1) error process with mean `mu` and marginal sd `sigma`.
/// With `exponentiate` the returned values are exp of the process (mu, sigma are
/// then log-scale moments).
struct ErrorProcessSpec {
    enum class Family { ar1, arma11 };

    Family family = Family::ar1;
    double rho = 0.0;
    double phi = 0.0;
    double mu = 0.0;
    double sigma = 1.0;
    bool exponentiate = false;
};

void validate(const ErrorProcessSpec& spec);

enum class ModelForm { additive, multiplicative };

enum class Method { pmwls, pwls, additive_naive };

/// One estimator row of a results table.
struct EstimatorSpec {
    Method method = Method::pmwls;
    WeightSpec weight;  // n is taken from the data
    Penalty::Family penalty = Penalty::Family::scad;
    std::string label;
};

/// "PMWLS", "PWLS (rho=0.5)", "PMWLS (rho=0.8,phi=0.4)", "Additive", ...
std::string default_label(const EstimatorSpec& est);

struct SimConfig {
    Index n = 200;
    Index reps = 100;
    Index d = 20;
    Index s = 3;
    Vector theta0;  // empty: (1, 1.2, 0.6, 0, ..., 0)
    ErrorProcessSpec error;
    ModelForm form = ModelForm::additive;
    std::vector<EstimatorSpec> estimators;
    std::uint64_t seed = 0;
    GridSpec grid;
    SolverConfig solver;
    double scad_a = 3.7;
};

/// (1, 1.2, 0.6, 0, ..., 0) of length d.
Vector default_theta0(Index d);

/// theta0 with the default filled in; validates the rest of the configuration.
Vector resolved_theta0(const SimConfig& cfg);
void validate(const SimConfig& cfg);

/// Column 1 ~ U[-1, 1]; columns 2..d jointly normal, variance 0.6, covariance 0.1.
RowMatrix gen_covariates(Index n, Index d, Rng& rng);

/// n consecutive values of the error process (AR(1) from its stationary law,
/// ARMA(1,1) after a 1000-step burn-in).
Vector gen_errors(const ErrorProcessSpec& spec, Index n, Rng& rng);

struct SimulatedData {
    Dataset data;      // log z for multiplicative data, raw z kept in data.raw
    Vector mean;       // f(x_t; theta0)
    Vector log_error;  // the generated process before exponentiation
};

/// Replication `rep` of the configured design. Covariates and errors come from
/// separate streams keyed by (seed, rep).
SimulatedData gen_dataset(const SimConfig& cfg, Index rep);

/// Model the estimator fits: the logistic mean, or its log for multiplicative data.
ModelSpec fitted_model(const SimConfig& cfg);

/// Fits one estimator to one replication (tuning tau by BIC unless penalty is none).
FitResult estimate(const EstimatorSpec& est, const SimulatedData& sim, const SimConfig& cfg);

struct MetricsRow {
    std::string label;
    Index n = 0;
    double mu = 0.0;
    double sigma = 0.0;
    Index reps_used = 0;
    Index failures = 0;
    bool aborted = false;
    double mse = 0.0;
    double sd = 0.0;
    double tp = 0.0;
    double tn = 0.0;
};

/// MSE = sum_j ||theta_j - theta0||^2 / (R p); SD = sqrt(sum_j ||theta_j - mean||^2 / (R - 1))
/// (NaN when R < 2); TP / TN average the counts of significant leading and
/// insignificant trailing coordinates, significance being |theta_i - target_i| > threshold.
MetricsRow metrics(const std::vector<Vector>& estimates, const Vector& theta0, const Vector& targets, Index s,
                   double threshold = 1e-6);

struct MetricsTable {
    std::vector<MetricsRow> rows;
};

/// Runs every estimator on `cfg.reps` replications using up to `threads` workers
/// (0: all cores). Results do not depend on the thread count. A cell whose failures
/// exceed 10% of the replications is marked aborted.
MetricsTable run_experiment(const SimConfig& cfg, unsigned threads = 0);

/// table,mu,sigma,method,n,reps,failures,mse,sd,tp,tn
void write_metrics_header(std::ostream& out);
void write_metrics_rows(std::ostream& out, const std::string& table, const MetricsTable& rows);

}  // namespace pmwls
