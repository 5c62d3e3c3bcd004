#include "pmwls/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmwls/error.hpp"

namespace pmwls {

void validate(const GridSpec& grid) {
    if (!grid.taus.empty()) {
        for (std::size_t i = 0; i < grid.taus.size(); ++i) {
            detail::require(grid.taus[i] > 0.0 && std::isfinite(grid.taus[i]), "grid taus must be positive");
            if (i > 0) detail::require(grid.taus[i] < grid.taus[i - 1], "grid taus must be strictly decreasing");
        }
        return;
    }
    detail::require(grid.count >= 1, "grid count must be >= 1");
    detail::require(grid.floor_ratio > 0.0 && grid.floor_ratio < 1.0, "grid floor ratio must lie in (0, 1)");
}

BicValue bic(const FitResult& fit, Index n) {
    detail::require(fit.residuals.size() == n && n >= 2, "bic needs the n residuals of the fit");
    const double mean = fit.residuals.mean();
    const double mean_sq = fit.residuals.squaredNorm() / static_cast<double>(n);
    BicValue out;
    out.sigma2 = mean_sq - mean * mean;
    if (out.sigma2 <= 1e-300) {
        out.degenerate = true;
        out.value = -std::numeric_limits<double>::infinity();
        return out;
    }
    const double nn = static_cast<double>(n);
    out.value = std::log(out.sigma2) + std::log(nn) * static_cast<double>(fit.df) / nn;
    return out;
}

std::vector<double> tau_grid(double tau_max, const GridSpec& grid) {
    validate(grid);
    if (!grid.taus.empty()) return grid.taus;
    detail::require(tau_max > 0.0, "tau_max must be positive");
    std::vector<double> taus(static_cast<std::size_t>(grid.count));
    if (grid.count == 1) {
        taus[0] = tau_max;
        return taus;
    }
    const double step = std::log(grid.floor_ratio) / static_cast<double>(grid.count - 1);
    for (Index i = 0; i < grid.count; ++i) taus[static_cast<std::size_t>(i)] = tau_max * std::exp(step * static_cast<double>(i));
    return taus;
}

TuningResult select_tau(const ObjectiveContext& ctx, const SolverConfig& cfg, const GridSpec& grid,
                        Estimator estimator) {
    const Penalty& base = ctx.penalty();
    detail::require(base.family != Penalty::Family::none, "tau selection needs a lasso or scad penalty");
    validate(grid);
    const bool intercept = estimator == Estimator::pwls;

    TuningResult out;
    if (grid.taus.empty()) {
        out.tau_max = stationary_tau(ctx, intercept, cfg);
        // Nothing moves at any tau when the gradient vanishes at the targets.
        if (out.tau_max <= 0.0) out.tau_max = 1e-12;
    } else {
        out.tau_max = grid.taus.front();
    }
    const std::vector<double> taus = tau_grid(out.tau_max, grid);

    SolverConfig step_cfg = cfg;
    bool all_degenerate = true;
    double best = std::numeric_limits<double>::infinity();
    bool have_best = false;
    for (double tau : taus) {
        Penalty pen = base;
        pen.tau = tau;
        const ObjectiveContext point_ctx = ctx.with_penalty(pen);
        PathPoint point;
        point.tau = tau;
        point.fit = intercept ? fit_pwls(point_ctx, step_cfg) : fit_pmwls(point_ctx, step_cfg);
        point.bic = bic(point.fit, ctx.n());
        if (!point.bic.degenerate) all_degenerate = false;
        // Strict comparison keeps the larger tau on ties.
        if (!have_best || point.bic.value < best) {
            best = point.bic.value;
            out.selected = static_cast<Index>(out.path.size());
            have_best = true;
        }
        step_cfg.init = SolverConfig::Init::explicit_value;
        step_cfg.init_theta = point.fit.theta_hat;
        out.path.push_back(std::move(point));
    }
    if (all_degenerate) detail::fail_numerical("every fit on the tau path has zero residual variance");
    out.tau = out.path[static_cast<std::size_t>(out.selected)].tau;
    out.fit = out.path[static_cast<std::size_t>(out.selected)].fit;
    return out;
}

}  // namespace pmwls
