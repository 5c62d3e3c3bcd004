#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pmwls/model.hpp"
#include "pmwls/objective.hpp"

namespace pmwls {

struct SolverConfig {
    /// `automatic` starts penalized fits at the targets and unpenalized fits at zero.
    enum class Init { automatic, zeros, targets, explicit_value };

    int max_sweeps = 1000;
    double tol_theta = 1e-6;   // max absolute coordinate change over a sweep
    double tol_obj = 1e-10;    // relative change of Q_n over a sweep
    int max_halvings = 20;
    Init init = Init::automatic;
    Vector init_theta;         // used with Init::explicit_value
    std::optional<Bounds> bounds;
    double active_threshold = 1e-6;
};

void validate(const SolverConfig& cfg);

struct FitResult {
    Vector theta_hat;
    std::optional<double> beta0;  // PWLS intercept
    bool converged = false;
    int sweeps = 0;
    double q_n = 0.0;
    double s_n = 0.0;
    std::vector<double> q_trace;  // Q_n at start, then after every sweep
    Vector residuals;             // y_t - f(x_t; theta_hat)
    std::vector<Index> active;    // |theta_hat_i - target_i| > active_threshold
    Index df = 0;
    std::vector<std::string> warnings;
};

/// Cyclic coordinate descent on Q_n = S_n + n sum p_tau(|theta_i - target_i|).
///
/// Coordinate k uses the Gauss-Newton scalar model g_k = [grad S_n]_k,
/// h_k = 2 f_k' Sigma_w f_k, proposes prox(theta_k - g_k / h_k) and backtracks by
/// halving until Q_n does not increase. Coordinates with h_k < 1e-12 are skipped for
/// that sweep. The Q_n trace is nonincreasing.
FitResult fit_pmwls(const ObjectiveContext& ctx, const SolverConfig& cfg = {});

/// Penalized weighted least squares with an unpenalized intercept:
///   (y - b0 - f)' K (y - b0 - f) + n sum p_tau(|theta_i - target_i|),
/// where K is the context's kernel (normally the inverse process covariance).
/// b0 takes its closed-form GLS value at the start of every sweep.
FitResult fit_pwls(const ObjectiveContext& ctx, const SolverConfig& cfg = {});

/// Context for PWLS: kernel is the inverse covariance of `weight` (identity for W = I).
ObjectiveContext make_pwls_context(Dataset data, ModelSpec model, const WeightSpec& weight,
                                   Penalty pen);

/// Context for the misspecified additive comparator: raw responses, base model, W = I.
ObjectiveContext make_additive_naive_context(const Dataset& data, ModelSpec base_model, Penalty pen);

/// PMWLS on the raw multiplicative responses against the base model, W = I.
FitResult fit_additive_naive(const Dataset& data, ModelSpec base_model, Penalty pen,
                             const SolverConfig& cfg = {});

/// Smallest tau for which one sweep started at the targets leaves every coordinate
/// in place (with the intercept profiled out when `intercept` is set).
double stationary_tau(const ObjectiveContext& ctx, bool intercept, const SolverConfig& cfg = {});

}  // namespace pmwls
