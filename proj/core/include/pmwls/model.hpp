#pragma once

#include <functional>
#include <optional>
#include <string>

#include "pmwls/types.hpp"

namespace pmwls {

enum class Scale { additive, log_of_multiplicative };

/// Responses y_t and covariate rows x_t for t = 1..n.
///
/// For multiplicative data `y` holds log z_t and `raw` keeps the original z_t.
struct Dataset {
    Vector y;
    RowMatrix x;
    Scale scale = Scale::additive;
    std::optional<Vector> raw;

    Index size() const { return y.size(); }
    Index dim() const { return x.cols(); }
};

/// Throws ValidationError unless n >= 2, x has n rows, and every entry is finite.
void validate(const Dataset& data);

/// Builds a dataset from raw observations. With `take_log`, every response must be
/// strictly positive; the logs are stored and the raw values kept in `raw`.
Dataset make_dataset(Vector y, RowMatrix x, bool take_log = false);

/// Returns a copy of `data` whose responses are `data.raw` on the additive scale.
/// Used by comparators that ignore the multiplicative structure.
Dataset raw_scale(const Dataset& data);

/// Mean function f(x; theta) with an optional analytic gradient.
///
/// Both callables must be free of mutable state; replications evaluate a shared
/// ModelSpec from several threads at once.
struct ModelSpec {
    using EvalFn = std::function<double(RowView x, const Vector& theta)>;
    using GradFn = std::function<void(RowView x, const Vector& theta, RowOut out)>;

    std::string name;
    Index dim_theta = 0;
    EvalFn eval;
    GradFn grad;  // empty: central differences are used
};

/// Optional per-coordinate box on theta.
struct Bounds {
    Vector lower;
    Vector upper;

    bool contains(const Vector& theta) const;
    Vector project(Vector theta) const;
};

struct ParameterVector {
    Vector theta;
    std::optional<Bounds> bounds;
};

void check_conforms(const ModelSpec& model, const ParameterVector& param);

/// f(x; theta) = 1 / (1 + exp(-x'theta)) with p = d.
ModelSpec logistic_model(Index d);

/// f(x; theta) = x'theta.
ModelSpec linear_model(Index d);

/// f ≡ c regardless of x and theta.
ModelSpec constant_model(Index p, double c);

/// log f(x; theta) for a strictly positive base model; gradient is grad f / f.
ModelSpec log_model(ModelSpec base);

/// Model by registry name ("logistic", "linear"), sized for covariate dimension d.
ModelSpec model_by_name(const std::string& name, Index d);

/// f(x_t; theta) for every row.
Vector model_values(const ModelSpec& model, const Dataset& data, const Vector& theta);

/// n x p Jacobian whose row t is the gradient of f(x_t; theta).
///
/// Uses the analytic gradient when present, otherwise central differences with
/// step 1e-6 * max(1, |theta_k|). Throws NumericalError naming (t, k) on a
/// non-finite entry.
Matrix model_gradient(const ModelSpec& model, const Dataset& data, const Vector& theta);

/// Central-difference gradient at a single row; exposed for cross-checks.
void finite_difference_gradient(const ModelSpec::EvalFn& eval, RowView x, const Vector& theta,
                                RowOut out);

}  // namespace pmwls
