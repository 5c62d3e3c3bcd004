#pragma once

#include <vector>

#include "pmwls/solver.hpp"

namespace pmwls {

enum class Estimator { pmwls, pwls };

/// Tau grid: `count` log-spaced values in [tau_max * floor_ratio, tau_max], or an
/// explicit list when `taus` is non-empty.
struct GridSpec {
    Index count = 50;
    double floor_ratio = 1e-4;
    std::vector<double> taus;
};

void validate(const GridSpec& grid);

struct BicValue {
    double value = 0.0;  // -infinity when degenerate
    double sigma2 = 0.0;
    bool degenerate = false;
};

/// log(sigma2) + log(n) df / n with sigma2 = mean(r^2) - mean(r)^2.
BicValue bic(const FitResult& fit, Index n);

/// One fitted point of the regularization path.
struct PathPoint {
    double tau = 0.0;
    BicValue bic;
    FitResult fit;
};

struct TuningResult {
    double tau = 0.0;
    double tau_max = 0.0;
    Index selected = 0;
    FitResult fit;
    std::vector<PathPoint> path;  // strictly decreasing tau
};

/// Descending grid from tau_max.
std::vector<double> tau_grid(double tau_max, const GridSpec& grid);

/// Fits the path from the largest tau down with warm starts and returns the tau
/// with the smallest BIC; ties go to the larger tau. The context's penalty supplies
/// the family, SCAD constant and targets; its tau is ignored.
TuningResult select_tau(const ObjectiveContext& ctx, const SolverConfig& cfg, const GridSpec& grid = {},
                        Estimator estimator = Estimator::pmwls);

}  // namespace pmwls
