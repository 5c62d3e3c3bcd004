#include "pmwls/evaluate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "pmwls/error.hpp"
#include "pmwls/parallel.hpp"
#include "pmwls/rng.hpp"

namespace pmwls {

double vaf(const Vector& y, const Vector& yhat) {
    detail::require(y.size() == yhat.size(), "vaf needs equal-length vectors");
    const double total = y.squaredNorm();
    detail::require(total > 0.0, "vaf is undefined when every observation is zero");
    return (1.0 - (y - yhat).squaredNorm() / total) * 100.0;
}

Correlogram acf_pacf(const Vector& series, Index maxlag) {
    const Index n = series.size();
    detail::require(maxlag >= 1 && 2 * maxlag < n, "acf needs 1 <= maxlag < n/2");
    const Vector c = (series.array() - series.mean()).matrix();
    const double c0 = c.squaredNorm();
    if (!(c0 > 0.0)) detail::fail_numerical("series has zero variance");

    Correlogram out;
    out.acf.resize(maxlag + 1);
    out.acf(0) = 1.0;
    for (Index k = 1; k <= maxlag; ++k) out.acf(k) = c.head(n - k).dot(c.tail(n - k)) / c0;

    // Durbin-Levinson
    out.pacf.resize(maxlag + 1);
    out.pacf(0) = 1.0;
    Vector prev = Vector::Zero(maxlag + 1);
    Vector cur = Vector::Zero(maxlag + 1);
    prev(1) = out.acf(1);
    out.pacf(1) = out.acf(1);
    double v = 1.0 - out.acf(1) * out.acf(1);
    for (Index k = 2; k <= maxlag; ++k) {
        double num = out.acf(k);
        for (Index j = 1; j < k; ++j) num -= prev(j) * out.acf(k - j);
        const double phikk = v > 0.0 ? num / v : 0.0;
        cur(k) = phikk;
        for (Index j = 1; j < k; ++j) cur(j) = prev(j) - phikk * prev(k - j);
        v *= (1.0 - phikk * phikk);
        out.pacf(k) = phikk;
        prev = cur;
    }
    return out;
}

double arma_css(const Vector& series, double rho, double phi) {
    const double mean = series.mean();
    double e_prev = 0.0;
    double css = 0.0;
    for (Index t = 1; t < series.size(); ++t) {
        const double e = (series(t) - mean) - rho * (series(t - 1) - mean) - phi * e_prev;
        css += e * e;
        e_prev = e;
    }
    return css;
}

namespace {

constexpr double kArmaBox = 0.99;

using Point = std::array<double, 2>;

Point clamp_box(Point p) {
    return {std::clamp(p[0], -kArmaBox, kArmaBox), std::clamp(p[1], -kArmaBox, kArmaBox)};
}

// Nelder-Mead on a 2-D function; points are clamped into the box before evaluation.
template <class F>
std::pair<Point, double> nelder_mead(F&& f, Point start, double step) {
    std::array<Point, 3> simplex{start, Point{start[0] + step, start[1]}, Point{start[0], start[1] + step}};
    std::array<double, 3> values{};
    for (auto& p : simplex) p = clamp_box(p);
    for (int i = 0; i < 3; ++i) values[i] = f(simplex[i]);

    auto order = [&] {
        std::array<int, 3> idx{0, 1, 2};
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return values[a] < values[b]; });
        std::array<Point, 3> s;
        std::array<double, 3> v;
        for (int i = 0; i < 3; ++i) {
            s[i] = simplex[idx[i]];
            v[i] = values[idx[i]];
        }
        simplex = s;
        values = v;
    };

    for (int iter = 0; iter < 1000; ++iter) {
        order();
        const double spread = std::abs(values[2] - values[0]);
        const double size = std::max(std::abs(simplex[2][0] - simplex[0][0]) + std::abs(simplex[2][1] - simplex[0][1]),
                                     std::abs(simplex[1][0] - simplex[0][0]) + std::abs(simplex[1][1] - simplex[0][1]));
        if (spread <= 1e-12 * (std::abs(values[0]) + 1e-300) && size < 1e-8) break;
        if (size < 1e-10) break;

        const Point centroid{(simplex[0][0] + simplex[1][0]) / 2.0, (simplex[0][1] + simplex[1][1]) / 2.0};
        auto along = [&](double coef) {
            return clamp_box({centroid[0] + coef * (simplex[2][0] - centroid[0]),
                              centroid[1] + coef * (simplex[2][1] - centroid[1])});
        };
        const Point reflected = along(-1.0);
        const double fr = f(reflected);
        if (fr < values[0]) {
            const Point expanded = along(-2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if (fr < values[1]) {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            const bool outside = fr < values[2];
            const Point contracted = along(outside ? -0.5 : 0.5);
            const double fc = f(contracted);
            if (fc < (outside ? fr : values[2])) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for (int i = 1; i < 3; ++i) {
                    simplex[i] = clamp_box({(simplex[i][0] + simplex[0][0]) / 2.0, (simplex[i][1] + simplex[0][1]) / 2.0});
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    order();
    return {simplex[0], values[0]};
}

}  // namespace

ArmaFit fit_residual_arma(const Vector& residuals) {
    detail::require(residuals.size() >= 20, "ARMA fit needs at least 20 residuals");
    detail::require(residuals.allFinite(), "residuals contain non-finite values");
    ArmaFit fit;
    const double variance = (residuals.array() - residuals.mean()).square().mean();
    if (!(variance > 1e-300)) {
        fit.css = 0.0;
        return fit;
    }
    auto objective = [&](const Point& p) { return arma_css(residuals, p[0], p[1]); };

    constexpr std::array<double, 5> grid{-0.8, -0.4, 0.0, 0.4, 0.8};
    std::vector<std::pair<double, Point>> starts;
    for (double r : grid)
        for (double f : grid) starts.push_back({objective({r, f}), Point{r, f}});
    std::stable_sort(starts.begin(), starts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    Point best{0.0, 0.0};
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 3; ++i) {
        auto [point, value] = nelder_mead(objective, starts[i].second, 0.1);
        if (value < best_value) {
            best_value = value;
            best = point;
        }
    }
    fit.rho = best[0];
    fit.phi = best[1];
    fit.css = best_value;
    fit.boundary = std::abs(best[0]) >= kArmaBox - 1e-6 || std::abs(best[1]) >= kArmaBox - 1e-6;
    return fit;
}

TypicalValues typical_values(const Dataset& data, const ModelSpec& model, const SolverConfig& cfg, Index restarts,
                             std::uint64_t seed, const std::optional<Bounds>& box, const Vector& center,
                             unsigned threads) {
    detail::require(restarts >= 2, "typical values need at least 2 pre-estimations");
    const Index p = model.dim_theta;
    Bounds init_box;
    if (box) {
        init_box = *box;
    } else {
        const Vector c = center.size() == 0 ? Vector::Zero(p) : center;
        detail::require(c.size() == p, "typical-value center has the wrong length");
        init_box.lower = c.array() - 1.0;
        init_box.upper = c.array() + 1.0;
    }
    detail::require(init_box.lower.size() == p && init_box.upper.size() == p, "box has the wrong length");

    const ObjectiveContext ctx(data, model, QuadraticKernel::centering(data.size()), Penalty::none());
    std::vector<std::optional<FitResult>> fits(static_cast<std::size_t>(restarts));
    parallel_for(fits.size(), threads, [&](std::size_t k) {
        Rng rng = make_rng(seed, k, Stream::restarts);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        SolverConfig run_cfg = cfg;
        run_cfg.init = SolverConfig::Init::explicit_value;
        run_cfg.init_theta.resize(p);
        for (Index i = 0; i < p; ++i)
            run_cfg.init_theta(i) = init_box.lower(i) + (init_box.upper(i) - init_box.lower(i)) * unif(rng);
        try {
            fits[k] = fit_pmwls(ctx, run_cfg);
        } catch (const NumericalError&) {
            fits[k].reset();
        }
    });

    TypicalValues out;
    out.average = Vector::Zero(p);
    for (const auto& fit : fits) {
        if (fit && fit->converged) {
            out.estimates.push_back(fit->theta_hat);
            out.average += fit->theta_hat;
        }
    }
    out.converged = static_cast<Index>(out.estimates.size());
    if (2 * out.converged < restarts)
        detail::fail_numerical("only " + std::to_string(out.converged) + " of " + std::to_string(restarts) +
                               " pre-estimations converged");
    out.average /= static_cast<double>(out.converged);
    return out;
}

namespace {

Vector original_scale(const Dataset& data) {
    return data.scale == Scale::log_of_multiplicative ? *data.raw : data.y;
}

TrialReport evaluate_split(const TrialSet& set, Index train, const PipelineConfig& cfg) {
    TrialReport report;
    report.train = train;
    const Dataset& data = set.trials[static_cast<std::size_t>(train)];
    const bool log_scale = data.scale == Scale::log_of_multiplicative;
    const ModelSpec fit_model = log_scale ? log_model(cfg.base_model) : cfg.base_model;

    const TypicalValues typical = typical_values(data, fit_model, cfg.solver, cfg.restarts,
                                                 derive_seed(cfg.seed, static_cast<std::uint64_t>(train), Stream::restarts),
                                                 cfg.box, cfg.center, 1);
    report.theta_tilde = typical.average;

    Penalty pen;
    pen.family = cfg.penalty;
    pen.a = cfg.scad_a;
    pen.targets = typical.average;
    auto tuned = [&](const ObjectiveContext& ctx) {
        if (pen.family == Penalty::Family::none) {
            TuningResult r;
            r.fit = fit_pmwls(ctx, cfg.solver);
            return r;
        }
        return select_tau(ctx, cfg.solver, cfg.grid, Estimator::pmwls);
    };

    const Index n = data.size();
    const TuningResult unweighted =
        tuned(ObjectiveContext(data, fit_model, QuadraticKernel::centering(n), pen));
    report.weight = fit_residual_arma(unweighted.fit.residuals);

    WeightMatrix wm;
    try {
        wm = build_weight(WeightSpec::arma11(report.weight.rho, report.weight.phi, n));
    } catch (const NumericalError& e) {
        report.note = std::string("weight fell back to identity: ") + e.what();
        wm = build_weight(WeightSpec::identity(n));
    }
    const TuningResult weighted = tuned(ObjectiveContext(data, fit_model, wm, pen));
    report.tau = weighted.tau;
    report.df = weighted.fit.df;
    report.theta_hat = weighted.fit.theta_hat;

    report.train_vaf = vaf(original_scale(data), model_values(cfg.base_model, data, report.theta_hat));
    for (Index j = 0; j < static_cast<Index>(set.trials.size()); ++j) {
        if (j == train) continue;
        const Dataset& test = set.trials[static_cast<std::size_t>(j)];
        report.test_vafs.emplace_back(j, vaf(original_scale(test), model_values(cfg.base_model, test, report.theta_hat)));
    }
    return report;
}

}  // namespace

VafReport train_test_eval(const TrialSet& set, const PipelineConfig& cfg) {
    detail::require(set.trials.size() >= 2, "train/test evaluation needs at least 2 trials");
    detail::require(static_cast<bool>(cfg.base_model.eval), "pipeline has no model");
    const Index d = set.trials.front().dim();
    for (const auto& trial : set.trials) {
        validate(trial);
        detail::require(trial.dim() == d, "trials disagree on the covariate dimension");
        detail::require(trial.scale == set.trials.front().scale, "trials disagree on the response scale");
    }

    VafReport report;
    report.subject = set.subject;
    report.trials.resize(set.trials.size());
    parallel_for(set.trials.size(), cfg.threads, [&](std::size_t i) {
        try {
            report.trials[i] = evaluate_split(set, static_cast<Index>(i), cfg);
        } catch (const NumericalError& e) {
            TrialReport failed;
            failed.train = static_cast<Index>(i);
            failed.failed = true;
            failed.note = e.what();
            report.trials[i] = std::move(failed);
        }
    });

    double train_sum = 0.0;
    double test_sum = 0.0;
    Index train_count = 0;
    Index test_count = 0;
    for (const auto& t : report.trials) {
        if (t.failed) continue;
        train_sum += t.train_vaf;
        ++train_count;
        for (const auto& [idx, value] : t.test_vafs) {
            test_sum += value;
            ++test_count;
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.average_train = train_count > 0 ? train_sum / static_cast<double>(train_count) : nan;
    report.average_test = test_count > 0 ? test_sum / static_cast<double>(test_count) : nan;
    return report;
}

}  // namespace pmwls
