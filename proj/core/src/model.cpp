#include "pmwls/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pmwls/error.hpp"

namespace pmwls {

void validate(const Dataset& data) {
    using detail::require;
    const Index n = data.y.size();
    require(n >= 2, "dataset needs at least 2 observations, got " + std::to_string(n));
    require(data.x.rows() == n, "covariate rows (" + std::to_string(data.x.rows()) +
                                    ") do not match responses (" + std::to_string(n) + ")");
    require(data.y.allFinite(), "responses contain non-finite values");
    require(data.x.allFinite(), "covariates contain non-finite values");
    if (data.raw) {
        require(data.raw->size() == n, "raw responses have the wrong length");
        require(data.raw->allFinite(), "raw responses contain non-finite values");
    }
    if (data.scale == Scale::log_of_multiplicative) {
        require(data.raw.has_value(), "log-scale dataset is missing its raw responses");
        require((data.raw->array() > 0.0).all(), "log-scale dataset has nonpositive raw responses");
    }
}

Dataset make_dataset(Vector y, RowMatrix x, bool take_log) {
    Dataset data;
    data.x = std::move(x);
    if (take_log) {
        for (Index t = 0; t < y.size(); ++t) {
            if (!(y(t) > 0.0)) {
                std::ostringstream msg;
                msg << "cannot take log of nonpositive response y[" << t << "] = " << y(t);
                detail::fail_validation(msg.str());
            }
        }
        data.raw = y;
        data.y = y.array().log().matrix();
        data.scale = Scale::log_of_multiplicative;
    } else {
        data.y = std::move(y);
    }
    validate(data);
    return data;
}

Dataset raw_scale(const Dataset& data) {
    detail::require(data.raw.has_value(), "dataset carries no raw responses");
    Dataset out;
    out.y = *data.raw;
    out.x = data.x;
    out.scale = Scale::additive;
    return out;
}

bool Bounds::contains(const Vector& theta) const {
    return (theta.array() >= lower.array()).all() && (theta.array() <= upper.array()).all();
}

Vector Bounds::project(Vector theta) const {
    return theta.cwiseMax(lower).cwiseMin(upper);
}

void check_conforms(const ModelSpec& model, const ParameterVector& param) {
    using detail::require;
    require(param.theta.size() == model.dim_theta,
            "parameter length " + std::to_string(param.theta.size()) + " does not match model " +
                model.name + " (p = " + std::to_string(model.dim_theta) + ")");
    if (param.bounds) {
        require(param.bounds->lower.size() == model.dim_theta &&
                    param.bounds->upper.size() == model.dim_theta,
                "bounds length does not match the model");
        require((param.bounds->lower.array() <= param.bounds->upper.array()).all(),
                "lower bound exceeds upper bound");
        require(param.bounds->contains(param.theta), "parameter lies outside its bounds");
    }
}

ModelSpec logistic_model(Index d) {
    detail::require(d >= 1, "logistic model needs d >= 1");
    ModelSpec m;
    m.name = "logistic";
    m.dim_theta = d;
    m.eval = [](RowView x, const Vector& theta) {
        return 1.0 / (1.0 + std::exp(-x.dot(theta.transpose())));
    };
    m.grad = [](RowView x, const Vector& theta, RowOut out) {
        const double f = 1.0 / (1.0 + std::exp(-x.dot(theta.transpose())));
        out = (f * (1.0 - f)) * x;
    };
    return m;
}

ModelSpec linear_model(Index d) {
    detail::require(d >= 1, "linear model needs d >= 1");
    ModelSpec m;
    m.name = "linear";
    m.dim_theta = d;
    m.eval = [](RowView x, const Vector& theta) { return x.dot(theta.transpose()); };
    m.grad = [](RowView x, const Vector&, RowOut out) { out = x; };
    return m;
}

ModelSpec constant_model(Index p, double c) {
    ModelSpec m;
    m.name = "constant";
    m.dim_theta = p;
    m.eval = [c](RowView, const Vector&) { return c; };
    m.grad = [](RowView, const Vector&, RowOut out) { out.setZero(); };
    return m;
}

ModelSpec log_model(ModelSpec base) {
    ModelSpec m;
    m.name = "log-" + base.name;
    m.dim_theta = base.dim_theta;
    auto base_eval = base.eval;
    m.eval = [base_eval](RowView x, const Vector& theta) { return std::log(base_eval(x, theta)); };
    if (base.grad) {
        auto base_grad = base.grad;
        m.grad = [base_eval, base_grad](RowView x, const Vector& theta, RowOut out) {
            base_grad(x, theta, out);
            out /= base_eval(x, theta);
        };
    }
    return m;
}

ModelSpec model_by_name(const std::string& name, Index d) {
    if (name == "logistic") return logistic_model(d);
    if (name == "linear") return linear_model(d);
    detail::fail_validation("unknown model '" + name + "' (known: logistic, linear)");
}

Vector model_values(const ModelSpec& model, const Dataset& data, const Vector& theta) {
    const Index n = data.size();
    Vector f(n);
    for (Index t = 0; t < n; ++t) f(t) = model.eval(data.x.row(t), theta);
    return f;
}

void finite_difference_gradient(const ModelSpec::EvalFn& eval, RowView x, const Vector& theta,
                                RowOut out) {
    Vector probe = theta;
    for (Index k = 0; k < theta.size(); ++k) {
        const double h = 1e-6 * std::max(1.0, std::abs(theta(k)));
        probe(k) = theta(k) + h;
        const double up = eval(x, probe);
        probe(k) = theta(k) - h;
        const double down = eval(x, probe);
        probe(k) = theta(k);
        out(k) = (up - down) / (2.0 * h);
    }
}

Matrix model_gradient(const ModelSpec& model, const Dataset& data, const Vector& theta) {
    const Index n = data.size();
    const Index p = model.dim_theta;
    RowMatrix jac(n, p);
    for (Index t = 0; t < n; ++t) {
        if (model.grad)
            model.grad(data.x.row(t), theta, jac.row(t));
        else
            finite_difference_gradient(model.eval, data.x.row(t), theta, jac.row(t));
    }
    if (!jac.allFinite()) {
        for (Index t = 0; t < n; ++t)
            for (Index k = 0; k < p; ++k)
                if (!std::isfinite(jac(t, k))) {
                    std::ostringstream msg;
                    msg << "non-finite derivative of " << model.name << " at row " << t
                        << ", coordinate " << k;
                    detail::fail_numerical(msg.str());
                }
    }
    return jac;
}

}  // namespace pmwls
