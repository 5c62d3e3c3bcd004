#pragma once

#include <string>

#include "pmwls/types.hpp"

namespace pmwls {

/// Temporal weight family. AR(1) uses `rho`; ARMA(1,1) uses `rho` (AR) and `phi` (MA)
/// with the convention e_t = rho e_{t-1} + u_t + phi u_{t-1}.
struct WeightSpec {
    enum class Kind { identity, ar1, arma11 };

    Kind kind = Kind::identity;
    double rho = 0.0;
    double phi = 0.0;
    Index n = 0;

    static WeightSpec identity(Index n) { return {Kind::identity, 0.0, 0.0, n}; }
    static WeightSpec ar1(double rho, Index n) { return {Kind::ar1, rho, 0.0, n}; }
    static WeightSpec arma11(double rho, double phi, Index n) { return {Kind::arma11, rho, phi, n}; }
};

void validate(const WeightSpec& spec);

/// Parses "identity", "none", "ar1:0.5" or "arma11:0.8:0.4"; n is filled in by the caller.
WeightSpec parse_weight_spec(const std::string& text, Index n = 0);

/// Inverse of parse_weight_spec (without n).
std::string to_string(const WeightSpec& spec);

/// Row-normalized whitening matrix W (W·1 = 1) and the quadratic-form kernel
/// sigma_w = W' (I - 11'/n) W with its largest eigenvalue.
struct WeightMatrix {
    Matrix w;
    Matrix sigma_w;
    double lambda_w = 0.0;
    bool is_identity = false;

    Index size() const { return w.rows(); }
};

/// I - (1/n) 11'.
Matrix centering_matrix(Index n);

/// Innovation variance of an ARMA(1,1) with marginal standard deviation sigma.
double arma_innovation_variance(double rho, double phi, double sigma);

/// Autocovariances gamma(0..maxlag) of a stationary ARMA(1,1) (AR(1) when phi = 0)
/// with marginal standard deviation sigma.
Vector arma_autocovariance(double rho, double phi, double sigma, Index maxlag);

/// Toeplitz covariance of the process with unit marginal variance.
Matrix process_covariance(const WeightSpec& spec);

/// Lower-triangular L with L C L' = I, before any row scaling.
Matrix whitening_factor(const WeightSpec& spec);

/// Inverse of the unit-variance process covariance (identity for Kind::identity).
Matrix inverse_covariance(const WeightSpec& spec);

/// Builds W by scaling each row of the whitening factor to sum to 1.
///
/// Throws NumericalError naming the row when a row sum has magnitude below 1e-10.
WeightMatrix build_weight(const WeightSpec& spec);

struct WeightDiagnostic {
    double norm1 = 0.0;     // max column abs sum of W
    double norm_inf = 0.0;  // max row abs sum of W
    double norm2 = 0.0;     // spectral norm of sigma_w (= lambda_w)
    double ratio = 0.0;     // norm1 * norm_inf / norm2
    double lambda_w = 0.0;
};

/// ||W||_1 ||W||_inf / ||W' Sigma_n W||_2. Informational only.
WeightDiagnostic assumption_ratio(const WeightMatrix& wm);

}  // namespace pmwls
