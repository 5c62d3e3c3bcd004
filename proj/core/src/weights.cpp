#include "pmwls/weights.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "pmwls/error.hpp"

namespace pmwls {

namespace {

void check_stationary(double rho, double phi) {
    detail::require(std::abs(rho) < 1.0, "AR coefficient must satisfy |rho| < 1");
    detail::require(std::abs(phi) < 1.0, "MA coefficient must satisfy |phi| < 1");
}

double parse_number(const std::string& text, const std::string& whole) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        detail::fail_validation("malformed weight spec '" + whole + "'");
    }
}

}  // namespace

void validate(const WeightSpec& spec) {
    detail::require(spec.n >= 2, "weight matrix needs n >= 2");
    switch (spec.kind) {
        case WeightSpec::Kind::identity:
            break;
        case WeightSpec::Kind::ar1:
            check_stationary(spec.rho, 0.0);
            break;
        case WeightSpec::Kind::arma11:
            check_stationary(spec.rho, spec.phi);
            break;
    }
}

WeightSpec parse_weight_spec(const std::string& text, Index n) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.empty()) detail::fail_validation("empty weight spec");
    const std::string& kind = parts.front();
    if ((kind == "identity" || kind == "none") && parts.size() == 1) return WeightSpec::identity(n);
    if (kind == "ar1" && parts.size() == 2) return WeightSpec::ar1(parse_number(parts[1], text), n);
    if (kind == "arma11" && parts.size() == 3)
        return WeightSpec::arma11(parse_number(parts[1], text), parse_number(parts[2], text), n);
    detail::fail_validation("malformed weight spec '" + text +
                            "' (expected identity, ar1:RHO or arma11:RHO:PHI)");
}

std::string to_string(const WeightSpec& spec) {
    std::ostringstream out;
    switch (spec.kind) {
        case WeightSpec::Kind::identity:
            out << "identity";
            break;
        case WeightSpec::Kind::ar1:
            out << "ar1:" << spec.rho;
            break;
        case WeightSpec::Kind::arma11:
            out << "arma11:" << spec.rho << ':' << spec.phi;
            break;
    }
    return out.str();
}

Matrix centering_matrix(Index n) {
    detail::require(n >= 2, "centering matrix needs n >= 2");
    Matrix c = Matrix::Constant(n, n, -1.0 / static_cast<double>(n));
    c.diagonal().array() += 1.0;
    return c;
}

double arma_innovation_variance(double rho, double phi, double sigma) {
    check_stationary(rho, phi);
    detail::require(sigma > 0.0, "marginal standard deviation must be positive");
    return sigma * sigma * (1.0 - rho * rho) / (1.0 + 2.0 * rho * phi + phi * phi);
}

Vector arma_autocovariance(double rho, double phi, double sigma, Index maxlag) {
    detail::require(maxlag >= 0, "maxlag must be nonnegative");
    const double innov = arma_innovation_variance(rho, phi, sigma);
    Vector gamma(maxlag + 1);
    gamma(0) = sigma * sigma;
    if (maxlag >= 1) gamma(1) = innov * (1.0 + rho * phi) * (rho + phi) / (1.0 - rho * rho);
    for (Index k = 2; k <= maxlag; ++k) gamma(k) = rho * gamma(k - 1);
    return gamma;
}

Matrix process_covariance(const WeightSpec& spec) {
    validate(spec);
    const Index n = spec.n;
    if (spec.kind == WeightSpec::Kind::identity) return Matrix::Identity(n, n);
    const double phi = spec.kind == WeightSpec::Kind::arma11 ? spec.phi : 0.0;
    const Vector gamma = arma_autocovariance(spec.rho, phi, 1.0, n - 1);
    Matrix c(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) c(i, j) = gamma(std::abs(i - j));
    return c;
}

Matrix whitening_factor(const WeightSpec& spec) {
    const Index n = spec.n;
    const Matrix c = process_covariance(spec);
    if (spec.kind == WeightSpec::Kind::identity) return c;
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() != Eigen::Success)
        detail::fail_numerical("process covariance is not positive definite (" + to_string(spec) + ")");
    // C = G G'  =>  L = G^{-1} satisfies L C L' = I and stays lower triangular.
    Matrix l = Matrix::Identity(n, n);
    llt.matrixL().solveInPlace(l);
    return l.triangularView<Eigen::Lower>();
}

Matrix inverse_covariance(const WeightSpec& spec) {
    const Matrix c = process_covariance(spec);
    if (spec.kind == WeightSpec::Kind::identity) return c;
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() != Eigen::Success)
        detail::fail_numerical("process covariance is not positive definite (" + to_string(spec) + ")");
    Matrix inv = llt.solve(Matrix::Identity(spec.n, spec.n));
    return 0.5 * (inv + inv.transpose());
}

WeightMatrix build_weight(const WeightSpec& spec) {
    validate(spec);
    const Index n = spec.n;
    WeightMatrix wm;
    wm.is_identity = spec.kind == WeightSpec::Kind::identity;
    wm.w = whitening_factor(spec);
    for (Index i = 0; i < n; ++i) {
        const double s = wm.w.row(i).sum();
        if (std::abs(s) < 1e-10) {
            std::ostringstream msg;
            msg << "whitening row " << i << " of " << to_string(spec) << " sums to " << s
                << "; cannot scale it to satisfy W1 = 1";
            detail::fail_numerical(msg.str());
        }
        wm.w.row(i) /= s;
    }
    // W' (I - 11'/n) W = W'W - (W'1)(W'1)'/n
    const Vector colsum = wm.w.transpose() * Vector::Ones(n);
    Matrix sw = wm.w.transpose() * wm.w;
    sw.noalias() -= colsum * colsum.transpose() / static_cast<double>(n);
    wm.sigma_w = 0.5 * (sw + sw.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(wm.sigma_w, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) detail::fail_numerical("eigen-solve of sigma_w failed");
    wm.lambda_w = eig.eigenvalues().maxCoeff();
    return wm;
}

WeightDiagnostic assumption_ratio(const WeightMatrix& wm) {
    WeightDiagnostic d;
    d.norm1 = wm.w.cwiseAbs().colwise().sum().maxCoeff();
    d.norm_inf = wm.w.cwiseAbs().rowwise().sum().maxCoeff();
    d.lambda_w = wm.lambda_w;
    d.norm2 = wm.lambda_w;
    d.ratio = d.norm1 * d.norm_inf / d.norm2;
    return d;
}

}  // namespace pmwls
