#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmwls/model.hpp"
#include "pmwls/tuning.hpp"

namespace pmwls {

/// [1 - sum (y - yhat)^2 / sum y^2] * 100.
double vaf(const Vector& y, const Vector& yhat);

/// Sample autocorrelation (mean-centered, normalized by lag 0) and partial
/// autocorrelation (Durbin-Levinson) for lags 0..maxlag; both are 1 at lag 0.
struct Correlogram {
    Vector acf;
    Vector pacf;
};

Correlogram acf_pacf(const Vector& series, Index maxlag);

/// Conditional sum of squares of an ARMA(1,1) fit to the centered series:
///   e_t = (r_t - rbar) - rho (r_{t-1} - rbar) - phi e_{t-1},   e_0 = 0.
double arma_css(const Vector& series, double rho, double phi);

struct ArmaFit {
    double rho = 0.0;
    double phi = 0.0;
    double css = 0.0;
    bool boundary = false;  // estimate sits on the search box edge
};

/// Minimizes arma_css over (-0.99, 0.99)^2: a 5 x 5 grid of starts, then Nelder-Mead
/// from the three best grid points.
ArmaFit fit_residual_arma(const Vector& residuals);

struct TypicalValues {
    Vector average;
    std::vector<Vector> estimates;  // converged fits only
    Index converged = 0;
};

/// Average of `restarts` unpenalized, unweighted PMWLS fits started uniformly in `box`
/// (default: [center - 1, center + 1] per coordinate). Fewer than restarts / 2
/// converged fits is an error.
TypicalValues typical_values(const Dataset& data, const ModelSpec& model, const SolverConfig& cfg,
                             Index restarts = 10, std::uint64_t seed = 0,
                             const std::optional<Bounds>& box = std::nullopt, const Vector& center = Vector(),
                             unsigned threads = 1);

/// Trials of one subject sharing a model.
struct TrialSet {
    std::string subject;
    std::vector<Dataset> trials;
};

struct PipelineConfig {
    ModelSpec base_model;  // fitted on the log scale when the trials are log-scale
    Penalty::Family penalty = Penalty::Family::scad;
    double scad_a = 3.7;
    GridSpec grid;
    SolverConfig solver;
    Index restarts = 10;
    std::uint64_t seed = 0;
    std::optional<Bounds> box;
    Vector center;
    unsigned threads = 0;
};

struct TrialReport {
    Index train = 0;
    bool failed = false;
    std::string note;
    ArmaFit weight;
    double tau = 0.0;
    Index df = 0;
    Vector theta_hat;
    Vector theta_tilde;
    double train_vaf = 0.0;
    std::vector<std::pair<Index, double>> test_vafs;  // (trial index, VAF)
};

struct VafReport {
    std::string subject;
    std::vector<TrialReport> trials;
    double average_train = 0.0;
    double average_test = 0.0;
};

/// Each trial in turn is the training set: typical values, ARMA(1,1) weight from the
/// residuals of the unweighted tuned fit, then the weighted tuned fit. Held-out trials
/// only enter the VAF of the final fit. VAF is computed on the original response scale
/// against the base model.
VafReport train_test_eval(const TrialSet& trials, const PipelineConfig& cfg);

}  // namespace pmwls
