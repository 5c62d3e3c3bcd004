#pragma once

#include <memory>
#include <string>

#include "pmwls/model.hpp"
#include "pmwls/types.hpp"
#include "pmwls/weights.hpp"

namespace pmwls {

/// Penalty p_tau applied to |theta_i - target_i|.
///
/// SCAD follows the Fan-Li form through its derivative
///   q(u) = tau                       for u <= tau
///   q(u) = (a tau - u)_+ / (a - 1)   for u >  tau
/// so p is linear up to tau, quadratic up to a tau, and flat at tau^2 (a + 1) / 2 beyond.
struct Penalty {
    enum class Family { none, lasso, scad };

    Family family = Family::none;
    double tau = 0.0;
    double a = 3.7;
    Vector targets;  // empty means all zeros

    static Penalty none() { return {}; }
    static Penalty lasso(double tau) { return {Family::lasso, tau, 3.7, {}}; }
    static Penalty scad(double tau, double a = 3.7) { return {Family::scad, tau, a, {}}; }

    double target(Index i) const { return targets.size() == 0 ? 0.0 : targets(i); }
    bool active() const { return family != Family::none && tau > 0.0; }
};

void validate(const Penalty& pen);
Penalty::Family parse_penalty_family(const std::string& name);
std::string to_string(Penalty::Family family);

/// p_tau(u) for u >= 0.
double penalty_scalar(const Penalty& pen, double u);

/// q_tau(u) = p_tau'(u) for u >= 0.
double penalty_deriv(const Penalty& pen, double u);

/// sum_i p_tau(|theta_i - target_i|), without the factor n.
double penalty_value(const Penalty& pen, const Vector& theta);

/// Minimizer of 0.5 h (u - z)^2 + n p_tau(|u - target|) over u.
///
/// LASSO is the soft threshold. SCAD is solved exactly piece by piece, which also
/// covers the nonconvex case n/h > a - 1; ties resolve toward the target.
double prox_scalar(const Penalty& pen, double z, double h, double n, double target = 0.0);

/// Symmetric kernel K of the residual quadratic form r'K r.
///
/// Identity and centering kernels are applied in O(n); dense kernels cost O(n^2).
class QuadraticKernel {
public:
    enum class Kind { identity, centering, dense };

    static QuadraticKernel identity(Index n);
    static QuadraticKernel centering(Index n);
    static QuadraticKernel dense(Matrix k);
    /// Sigma_w of a weight matrix; the centering fast path is used for W = I.
    static QuadraticKernel from_weight(const WeightMatrix& wm);

    Kind kind() const { return kind_; }
    Index size() const { return n_; }
    Vector apply(const Vector& v) const;
    double quad(const Vector& v) const;
    Matrix to_dense() const;

private:
    Kind kind_ = Kind::identity;
    Index n_ = 0;
    std::shared_ptr<const Matrix> k_;
};

/// Dataset, model, kernel and penalty for one fit. Immutable; copies share the data.
class ObjectiveContext {
public:
    ObjectiveContext(Dataset data, ModelSpec model, const WeightMatrix& weight, Penalty pen);
    ObjectiveContext(Dataset data, ModelSpec model, QuadraticKernel kernel, Penalty pen);

    const Dataset& data() const { return *data_; }
    const ModelSpec& model() const { return *model_; }
    const QuadraticKernel& kernel() const { return kernel_; }
    const Penalty& penalty() const { return penalty_; }
    Index n() const { return data_->size(); }
    Index p() const { return model_->dim_theta; }

    ObjectiveContext with_penalty(Penalty pen) const;

private:
    std::shared_ptr<const Dataset> data_;
    std::shared_ptr<const ModelSpec> model_;
    QuadraticKernel kernel_;
    Penalty penalty_;
};

/// r = y - f(x; theta).
Vector residuals(const ObjectiveContext& ctx, const Vector& theta);

/// S_n(theta) = r' Sigma_w r.
double s_n(const ObjectiveContext& ctx, const Vector& theta);

/// -2 F'(theta)' Sigma_w r.
Vector s_n_gradient(const ObjectiveContext& ctx, const Vector& theta);

/// S_n(theta) + n * penalty_value(theta).
double q_n(const ObjectiveContext& ctx, const Vector& theta);

}  // namespace pmwls
