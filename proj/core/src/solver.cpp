#include "pmwls/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pmwls/error.hpp"

namespace pmwls {

void validate(const SolverConfig& cfg) {
    detail::require(cfg.max_sweeps >= 1, "max_sweeps must be >= 1");
    detail::require(cfg.tol_theta > 0.0 && cfg.tol_obj > 0.0, "solver tolerances must be positive");
    detail::require(cfg.max_halvings >= 0, "max_halvings must be >= 0");
    detail::require(cfg.active_threshold >= 0.0, "active threshold must be nonnegative");
}

namespace {

constexpr double kFlatCurvature = 1e-12;

class CoordinateDescent {
public:
    CoordinateDescent(const ObjectiveContext& ctx, const SolverConfig& cfg, bool intercept)
        : ctx_(ctx), cfg_(cfg), intercept_(intercept), n_(static_cast<double>(ctx.n())) {
        validate(cfg_);
        if (intercept_) {
            k_ones_ = ctx_.kernel().apply(Vector::Ones(ctx_.n()));
            ones_k_ones_ = k_ones_.sum();
            detail::require(ones_k_ones_ > 0.0, "intercept is not identifiable under this kernel");
        }
    }

    FitResult run() {
        theta_ = initial_theta();
        if (cfg_.bounds) theta_ = cfg_.bounds->project(theta_);
        f_ = model_values(ctx_.model(), ctx_.data(), theta_);
        if (intercept_) beta0_ = best_intercept(f_);
        q_ = objective(f_, beta0_, theta_);
        if (!std::isfinite(q_)) detail::fail_numerical("objective is not finite at the initial point");

        FitResult out;
        out.q_trace.push_back(q_);
        const Index p = ctx_.p();
        for (int sweep = 1; sweep <= cfg_.max_sweeps; ++sweep) {
            const double q_prev = q_;
            if (intercept_) {
                beta0_ = best_intercept(f_);
                q_ = objective(f_, beta0_, theta_);
            }
            double max_change = 0.0;
            for (Index k = 0; k < p; ++k) max_change = std::max(max_change, update(k, sweep, out));
            out.q_trace.push_back(q_);
            out.sweeps = sweep;
            if (!std::isfinite(q_)) {
                std::ostringstream msg;
                msg << "objective became non-finite at sweep " << sweep << "; trace:";
                for (double v : out.q_trace) msg << ' ' << v;
                detail::fail_numerical(msg.str());
            }
            const double rel = std::abs(q_prev - q_) / std::max(std::abs(q_prev), 1e-300);
            if (max_change < cfg_.tol_theta || rel < cfg_.tol_obj) {
                out.converged = true;
                break;
            }
        }
        finish(out);
        return out;
    }

private:
    Vector initial_theta() const {
        const Index p = ctx_.p();
        const Penalty& pen = ctx_.penalty();
        auto targets = [&] {
            Vector t = Vector::Zero(p);
            if (pen.targets.size() == p) t = pen.targets;
            return t;
        };
        switch (cfg_.init) {
            case SolverConfig::Init::automatic:
                return pen.family == Penalty::Family::none ? Vector::Zero(p) : targets();
            case SolverConfig::Init::zeros:
                return Vector::Zero(p);
            case SolverConfig::Init::targets:
                return targets();
            case SolverConfig::Init::explicit_value:
                detail::require(cfg_.init_theta.size() == p, "initial theta has the wrong length");
                return cfg_.init_theta;
        }
        return Vector::Zero(p);
    }

    double best_intercept(const Vector& f) const {
        return k_ones_.dot(ctx_.data().y - f) / ones_k_ones_;
    }

    double objective(const Vector& f, double b0, const Vector& theta) const {
        Vector r = ctx_.data().y - f;
        if (intercept_) r.array() -= b0;
        return ctx_.kernel().quad(r) + n_ * penalty_value(ctx_.penalty(), theta);
    }

    // Returns |delta theta_k|.
    double update(Index k, int sweep, FitResult& out) {
        const Matrix jac = model_gradient(ctx_.model(), ctx_.data(), theta_);
        Vector r = ctx_.data().y - f_;
        if (intercept_) r.array() -= beta0_;
        const Vector fk = jac.col(k);
        const Vector kfk = ctx_.kernel().apply(fk);
        const double h = 2.0 * fk.dot(kfk);
        if (!(h >= kFlatCurvature)) {
            std::ostringstream msg;
            msg << "sweep " << sweep << ": coordinate " << k << " skipped (curvature " << h << ")";
            out.warnings.push_back(msg.str());
            return 0.0;
        }
        const double g = -2.0 * kfk.dot(r);
        const double current = theta_(k);
        double candidate = prox_scalar(ctx_.penalty(), current - g / h, h, n_, ctx_.penalty().target(k));
        if (cfg_.bounds)
            candidate = std::clamp(candidate, cfg_.bounds->lower(k), cfg_.bounds->upper(k));
        if (candidate == current) return 0.0;

        double step = candidate - current;
        Vector trial = theta_;
        for (int halving = 0; halving <= cfg_.max_halvings; ++halving) {
            trial(k) = current + step;
            Vector f_trial = model_values(ctx_.model(), ctx_.data(), trial);
            const double q_trial = f_trial.allFinite() ? objective(f_trial, beta0_, trial)
                                                       : std::numeric_limits<double>::infinity();
            if (q_trial <= q_) {
                theta_ = trial;
                f_ = std::move(f_trial);
                q_ = q_trial;
                return std::abs(step);
            }
            step *= 0.5;
        }
        return 0.0;
    }

    void finish(FitResult& out) const {
        out.theta_hat = theta_;
        out.q_n = q_;
        Vector r = ctx_.data().y - f_;
        out.residuals = r;
        if (intercept_) {
            out.beta0 = beta0_;
            r.array() -= beta0_;
        }
        out.s_n = ctx_.kernel().quad(r);
        const Penalty& pen = ctx_.penalty();
        for (Index i = 0; i < theta_.size(); ++i)
            if (std::abs(theta_(i) - pen.target(i)) > cfg_.active_threshold) out.active.push_back(i);
        out.df = static_cast<Index>(out.active.size());
    }

    const ObjectiveContext& ctx_;
    const SolverConfig& cfg_;
    bool intercept_;
    double n_;
    Vector k_ones_;
    double ones_k_ones_ = 0.0;
    Vector theta_;
    Vector f_;
    double beta0_ = 0.0;
    double q_ = 0.0;
};

}  // namespace

FitResult fit_pmwls(const ObjectiveContext& ctx, const SolverConfig& cfg) {
    return CoordinateDescent(ctx, cfg, false).run();
}

FitResult fit_pwls(const ObjectiveContext& ctx, const SolverConfig& cfg) {
    return CoordinateDescent(ctx, cfg, true).run();
}

ObjectiveContext make_pwls_context(Dataset data, ModelSpec model, const WeightSpec& weight, Penalty pen) {
    WeightSpec spec = weight;
    spec.n = data.size();
    QuadraticKernel kernel = spec.kind == WeightSpec::Kind::identity
                                 ? QuadraticKernel::identity(spec.n)
                                 : QuadraticKernel::dense(inverse_covariance(spec));
    return ObjectiveContext(std::move(data), std::move(model), std::move(kernel), std::move(pen));
}

ObjectiveContext make_additive_naive_context(const Dataset& data, ModelSpec base_model, Penalty pen) {
    Dataset raw = raw_scale(data);
    const Index n = raw.size();
    return ObjectiveContext(std::move(raw), std::move(base_model), QuadraticKernel::centering(n),
                            std::move(pen));
}

FitResult fit_additive_naive(const Dataset& data, ModelSpec base_model, Penalty pen, const SolverConfig& cfg) {
    return fit_pmwls(make_additive_naive_context(data, std::move(base_model), std::move(pen)), cfg);
}

double stationary_tau(const ObjectiveContext& ctx, bool intercept, const SolverConfig& cfg) {
    const Penalty& pen = ctx.penalty();
    detail::require(pen.family != Penalty::Family::none, "tau search needs a lasso or scad penalty");
    const Index p = ctx.p();
    const double n = static_cast<double>(ctx.n());
    Vector theta = Vector::Zero(p);
    if (pen.targets.size() == p) theta = pen.targets;
    if (cfg.bounds) theta = cfg.bounds->project(theta);

    Vector r = residuals(ctx, theta);
    if (intercept) {
        const Vector k_ones = ctx.kernel().apply(Vector::Ones(ctx.n()));
        r.array() -= k_ones.dot(r) / k_ones.sum();
    }
    const Vector kr = ctx.kernel().apply(r);
    const Matrix jac = model_gradient(ctx.model(), ctx.data(), theta);

    std::vector<double> g(p), h(p);
    double tau = 0.0;
    for (Index k = 0; k < p; ++k) {
        const Vector fk = jac.col(k);
        h[k] = 2.0 * fk.dot(ctx.kernel().apply(fk));
        g[k] = -2.0 * fk.dot(kr);
        if (h[k] >= kFlatCurvature) tau = std::max(tau, std::abs(g[k]) / n);
    }
    if (tau == 0.0) return 0.0;

    auto stays = [&](double t) {
        Penalty trial = pen;
        trial.tau = t;
        for (Index k = 0; k < p; ++k) {
            if (h[k] < kFlatCurvature) continue;
            if (prox_scalar(trial, theta(k) - g[k] / h[k], h[k], n, pen.target(k)) != theta(k)) return false;
        }
        return true;
    };
    // The lasso threshold |g|/n is exact for the soft threshold; SCAD may need more
    // because its flat tail can beat the origin when n/h is large. Staying put is
    // monotone in tau, so bracket and bisect.
    double lo = tau;
    double hi = tau;
    if (stays(hi)) return hi;
    while (!stays(hi)) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 60 && (hi - lo) > 1e-9 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (stays(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace pmwls
