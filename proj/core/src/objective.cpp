#include "pmwls/objective.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "pmwls/error.hpp"

namespace pmwls {

void validate(const Penalty& pen) {
    detail::require(pen.tau >= 0.0 && std::isfinite(pen.tau), "penalty tau must be finite and >= 0");
    if (pen.family == Penalty::Family::scad) detail::require(pen.a > 2.0, "SCAD requires a > 2");
    if (pen.targets.size() != 0)
        detail::require(pen.targets.allFinite(), "penalty targets must be finite");
}

Penalty::Family parse_penalty_family(const std::string& name) {
    if (name == "none") return Penalty::Family::none;
    if (name == "lasso") return Penalty::Family::lasso;
    if (name == "scad") return Penalty::Family::scad;
    detail::fail_validation("unknown penalty '" + name + "' (known: none, lasso, scad)");
}

std::string to_string(Penalty::Family family) {
    switch (family) {
        case Penalty::Family::none: return "none";
        case Penalty::Family::lasso: return "lasso";
        case Penalty::Family::scad: return "scad";
    }
    return "none";
}

double penalty_scalar(const Penalty& pen, double u) {
    detail::require(u >= 0.0, "penalty argument must be nonnegative");
    const double tau = pen.tau;
    switch (pen.family) {
        case Penalty::Family::none:
            return 0.0;
        case Penalty::Family::lasso:
            return tau * u;
        case Penalty::Family::scad:
            if (u <= tau) return tau * u;
            if (u <= pen.a * tau)
                return (2.0 * pen.a * tau * u - u * u - tau * tau) / (2.0 * (pen.a - 1.0));
            return tau * tau * (pen.a + 1.0) / 2.0;
    }
    return 0.0;
}

double penalty_deriv(const Penalty& pen, double u) {
    detail::require(u >= 0.0, "penalty argument must be nonnegative");
    const double tau = pen.tau;
    switch (pen.family) {
        case Penalty::Family::none:
            return 0.0;
        case Penalty::Family::lasso:
            return tau;
        case Penalty::Family::scad:
            if (u <= tau) return tau;
            return std::max(pen.a * tau - u, 0.0) / (pen.a - 1.0);
    }
    return 0.0;
}

double penalty_value(const Penalty& pen, const Vector& theta) {
    if (pen.family == Penalty::Family::none) return 0.0;
    double total = 0.0;
    for (Index i = 0; i < theta.size(); ++i) total += penalty_scalar(pen, std::abs(theta(i) - pen.target(i)));
    return total;
}

namespace {

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

// Global minimizer of 0.5 (v - z)^2 + w p_tau(|v|), w = n / h, by comparing the
// best point of each piece of the SCAD penalty.
double scad_prox(double z, double w, double tau, double a) {
    const double sgn = z < 0.0 ? -1.0 : 1.0;
    const double az = std::abs(z);
    auto objective = [&](double v) {
        const double u = std::abs(v);
        double p;
        if (u <= tau)
            p = tau * u;
        else if (u <= a * tau)
            p = (2.0 * a * tau * u - u * u - tau * tau) / (2.0 * (a - 1.0));
        else
            p = tau * tau * (a + 1.0) / 2.0;
        return 0.5 * (v - az) * (v - az) + w * p;
    };

    // Only v >= 0 can be optimal for z >= 0; work with |z| and restore the sign.
    std::array<double, 6> candidates{};
    std::size_t count = 0;
    candidates[count++] = 0.0;
    candidates[count++] = std::clamp(soft_threshold(az, w * tau), 0.0, tau);
    if (a - 1.0 - w > 0.0) {
        const double v = (az * (a - 1.0) - w * a * tau) / (a - 1.0 - w);
        candidates[count++] = std::clamp(v, tau, a * tau);
    }
    candidates[count++] = tau;
    candidates[count++] = a * tau;
    candidates[count++] = std::max(az, a * tau);

    double best = 0.0;
    double best_obj = objective(0.0);
    for (std::size_t i = 1; i < count; ++i) {
        const double obj = objective(candidates[i]);
        if (obj < best_obj) {
            best_obj = obj;
            best = candidates[i];
        }
    }
    return sgn * best;
}

}  // namespace

double prox_scalar(const Penalty& pen, double z, double h, double n, double target) {
    detail::require(h > 0.0, "prox curvature must be positive");
    const double shifted = z - target;
    switch (pen.family) {
        case Penalty::Family::none:
            return z;
        case Penalty::Family::lasso:
            return target + soft_threshold(shifted, n * pen.tau / h);
        case Penalty::Family::scad:
            if (pen.tau == 0.0) return z;
            return target + scad_prox(shifted, n / h, pen.tau, pen.a);
    }
    return z;
}

QuadraticKernel QuadraticKernel::identity(Index n) {
    QuadraticKernel k;
    k.kind_ = Kind::identity;
    k.n_ = n;
    return k;
}

QuadraticKernel QuadraticKernel::centering(Index n) {
    QuadraticKernel k;
    k.kind_ = Kind::centering;
    k.n_ = n;
    return k;
}

QuadraticKernel QuadraticKernel::dense(Matrix m) {
    detail::require(m.rows() == m.cols(), "kernel must be square");
    QuadraticKernel k;
    k.kind_ = Kind::dense;
    k.n_ = m.rows();
    k.k_ = std::make_shared<const Matrix>(std::move(m));
    return k;
}

QuadraticKernel QuadraticKernel::from_weight(const WeightMatrix& wm) {
    if (wm.is_identity) return centering(wm.size());
    return dense(wm.sigma_w);
}

Vector QuadraticKernel::apply(const Vector& v) const {
    switch (kind_) {
        case Kind::identity:
            return v;
        case Kind::centering:
            return (v.array() - v.mean()).matrix();
        case Kind::dense:
            return (*k_) * v;
    }
    return v;
}

double QuadraticKernel::quad(const Vector& v) const {
    switch (kind_) {
        case Kind::identity:
            return v.squaredNorm();
        case Kind::centering:
            return (v.array() - v.mean()).square().sum();
        case Kind::dense:
            return v.dot((*k_) * v);
    }
    return 0.0;
}

Matrix QuadraticKernel::to_dense() const {
    switch (kind_) {
        case Kind::identity:
            return Matrix::Identity(n_, n_);
        case Kind::centering:
            return centering_matrix(n_);
        case Kind::dense:
            return *k_;
    }
    return {};
}

ObjectiveContext::ObjectiveContext(Dataset data, ModelSpec model, const WeightMatrix& weight,
                                   Penalty pen)
    : ObjectiveContext(std::move(data), std::move(model), QuadraticKernel::from_weight(weight),
                       std::move(pen)) {}

ObjectiveContext::ObjectiveContext(Dataset data, ModelSpec model, QuadraticKernel kernel, Penalty pen)
    : data_(std::make_shared<const Dataset>(std::move(data))),
      model_(std::make_shared<const ModelSpec>(std::move(model))),
      kernel_(std::move(kernel)),
      penalty_(std::move(pen)) {
    validate(*data_);
    validate(penalty_);
    detail::require(static_cast<bool>(model_->eval), "model has no evaluation function");
    detail::require(kernel_.size() == data_->size(),
                    "kernel size " + std::to_string(kernel_.size()) + " does not match n = " +
                        std::to_string(data_->size()));
    detail::require(penalty_.targets.size() == 0 || penalty_.targets.size() == model_->dim_theta,
                    "penalty targets length does not match the model");
}

ObjectiveContext ObjectiveContext::with_penalty(Penalty pen) const {
    validate(pen);
    detail::require(pen.targets.size() == 0 || pen.targets.size() == p(),
                    "penalty targets length does not match the model");
    ObjectiveContext copy = *this;
    copy.penalty_ = std::move(pen);
    return copy;
}

Vector residuals(const ObjectiveContext& ctx, const Vector& theta) {
    detail::require(theta.size() == ctx.p(), "theta length does not match the model");
    Vector r = ctx.data().y - model_values(ctx.model(), ctx.data(), theta);
    if (!r.allFinite()) detail::fail_numerical("model " + ctx.model().name + " produced non-finite values");
    return r;
}

double s_n(const ObjectiveContext& ctx, const Vector& theta) {
    return ctx.kernel().quad(residuals(ctx, theta));
}

Vector s_n_gradient(const ObjectiveContext& ctx, const Vector& theta) {
    const Vector kr = ctx.kernel().apply(residuals(ctx, theta));
    const Matrix jac = model_gradient(ctx.model(), ctx.data(), theta);
    return -2.0 * (jac.transpose() * kr);
}

double q_n(const ObjectiveContext& ctx, const Vector& theta) {
    return s_n(ctx, theta) + static_cast<double>(ctx.n()) * penalty_value(ctx.penalty(), theta);
}

}  // namespace pmwls
