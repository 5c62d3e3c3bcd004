#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "pmwls/error.hpp"
#include "pmwls/weights.hpp"

namespace pmwls {
namespace {

std::vector<WeightSpec> all_specs(Index n) {
    return {WeightSpec::identity(n), WeightSpec::ar1(0.5, n), WeightSpec::ar1(0.9, n), WeightSpec::ar1(-0.4, n),
            WeightSpec::arma11(0.8, 0.4, n), WeightSpec::arma11(0.3, -0.5, n)};
}

TEST(Weights, CenteringMatrixSmall) {
    Matrix c = centering_matrix(2);
    EXPECT_DOUBLE_EQ(c(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(c(0, 1), -0.5);
    EXPECT_DOUBLE_EQ(c(1, 0), -0.5);
    EXPECT_DOUBLE_EQ(c(1, 1), 0.5);
}

TEST(Weights, CenteringIsIdempotentAndKillsConstants) {
    Matrix c = centering_matrix(5);
    EXPECT_LT((c * c - c).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((c * Vector::Ones(5)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Weights, Ar1AutocovarianceDecaysGeometrically) {
    Vector g = arma_autocovariance(0.5, 0.0, 1.0, 4);
    for (Index k = 0; k <= 4; ++k) EXPECT_NEAR(g(k), std::pow(0.5, static_cast<double>(k)), 1e-15);
}

TEST(Weights, ArmaInnovationVariance) {
    EXPECT_NEAR(arma_innovation_variance(0.8, 0.4, 0.5), 0.25 * 0.36 / 1.8, 1e-15);
    EXPECT_NEAR(arma_innovation_variance(0.8, 0.4, 0.5), 0.05, 1e-15);
}

TEST(Weights, ArmaAutocovarianceMatchesPsiWeights) {
    // gamma(k) = s2 sum_j psi_j psi_{j+k}, psi_0 = 1, psi_j = (rho + phi) rho^{j-1}.
    const double rho = 0.8, phi = 0.4, sigma = 0.5;
    const double s2 = arma_innovation_variance(rho, phi, sigma);
    std::vector<double> psi(2000);
    psi[0] = 1.0;
    for (std::size_t j = 1; j < psi.size(); ++j) psi[j] = (rho + phi) * std::pow(rho, static_cast<double>(j - 1));
    Vector g = arma_autocovariance(rho, phi, sigma, 3);
    for (Index k = 0; k <= 3; ++k) {
        double sum = 0.0;
        for (std::size_t j = 0; j + static_cast<std::size_t>(k) < psi.size(); ++j) sum += psi[j] * psi[j + k];
        EXPECT_NEAR(g(k), s2 * sum, 1e-12);
    }
    EXPECT_NEAR(g(0), sigma * sigma, 1e-14);
}

TEST(Weights, HandDerivedAr1MatrixForThreePoints) {
    WeightMatrix wm = build_weight(WeightSpec::ar1(0.5, 3));
    Matrix expected(3, 3);
    expected << 1, 0, 0, -1, 2, 0, 0, -1, 2;
    EXPECT_LT((wm.w - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Weights, IdentitySpecGivesCentering) {
    WeightMatrix wm = build_weight(WeightSpec::identity(4));
    EXPECT_TRUE(wm.is_identity);
    EXPECT_LT((wm.w - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((wm.sigma_w - centering_matrix(4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Weights, RowsSumToOne) {
    for (Index n : {3, 10, 50, 200})
        for (const auto& spec : all_specs(n)) {
            WeightMatrix wm = build_weight(spec);
            EXPECT_LT((wm.w * Vector::Ones(n) - Vector::Ones(n)).cwiseAbs().maxCoeff(), 1e-10) << to_string(spec);
        }
}

TEST(Weights, WhiteningIdentity) {
    for (Index n : {3, 10, 50})
        for (const auto& spec : all_specs(n)) {
            Matrix l = whitening_factor(spec);
            Matrix c = process_covariance(spec);
            EXPECT_LT((l * c * l.transpose() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-8)
                << to_string(spec) << " n=" << n;
            EXPECT_LT(l.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().maxCoeff(), 1e-15);
        }
}

TEST(Weights, InverseCovariance) {
    for (const auto& spec : all_specs(12)) {
        Matrix prod = inverse_covariance(spec) * process_covariance(spec);
        EXPECT_LT((prod - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-9) << to_string(spec);
    }
}

TEST(Weights, KernelIsSymmetricPsdAndAnnihilatesConstants) {
    for (const auto& spec : all_specs(30)) {
        WeightMatrix wm = build_weight(spec);
        EXPECT_LT((wm.sigma_w - wm.sigma_w.transpose()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((wm.sigma_w * Vector::Ones(30)).cwiseAbs().maxCoeff(), 1e-8);
        Eigen::SelfAdjointEigenSolver<Matrix> es(wm.sigma_w);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
        EXPECT_NEAR(wm.lambda_w, es.eigenvalues().maxCoeff(), 1e-9 * wm.lambda_w);
        Matrix direct = wm.w.transpose() * centering_matrix(30) * wm.w;
        EXPECT_LT((wm.sigma_w - direct).cwiseAbs().maxCoeff(), 1e-9 * direct.cwiseAbs().maxCoeff());
    }
}

TEST(Weights, BuildIsDeterministic) {
    WeightMatrix a = build_weight(WeightSpec::arma11(0.8, 0.4, 40));
    WeightMatrix b = build_weight(WeightSpec::arma11(0.8, 0.4, 40));
    EXPECT_TRUE((a.w.array() == b.w.array()).all());
    EXPECT_TRUE((a.sigma_w.array() == b.sigma_w.array()).all());
}

TEST(Weights, AssumptionRatioIdentity) {
    WeightDiagnostic d = assumption_ratio(build_weight(WeightSpec::identity(4)));
    EXPECT_NEAR(d.norm1, 1.0, 1e-15);
    EXPECT_NEAR(d.norm_inf, 1.0, 1e-15);
    EXPECT_NEAR(d.norm2, 1.0, 1e-12);
    EXPECT_NEAR(d.ratio, 1.0, 1e-12);
}

TEST(Weights, AssumptionRatioAr1ThreePoints) {
    WeightMatrix wm = build_weight(WeightSpec::ar1(0.5, 3));
    WeightDiagnostic d = assumption_ratio(wm);
    EXPECT_NEAR(d.norm1, 3.0, 1e-12);
    EXPECT_NEAR(d.norm_inf, 3.0, 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(wm.w.transpose() * centering_matrix(3) * wm.w);
    EXPECT_NEAR(d.norm2, es.eigenvalues().maxCoeff(), 1e-10);
    EXPECT_NEAR(d.ratio, 9.0 / es.eigenvalues().maxCoeff(), 1e-10);
}

TEST(Weights, ParseSpecs) {
    EXPECT_EQ(parse_weight_spec("identity").kind, WeightSpec::Kind::identity);
    EXPECT_EQ(parse_weight_spec("none").kind, WeightSpec::Kind::identity);
    WeightSpec a = parse_weight_spec("ar1:0.5", 7);
    EXPECT_EQ(a.kind, WeightSpec::Kind::ar1);
    EXPECT_DOUBLE_EQ(a.rho, 0.5);
    EXPECT_EQ(a.n, 7);
    WeightSpec b = parse_weight_spec("arma11:0.8:0.4");
    EXPECT_DOUBLE_EQ(b.phi, 0.4);
    EXPECT_EQ(parse_weight_spec(to_string(b)).rho, 0.8);
    EXPECT_THROW(parse_weight_spec("ar1"), ValidationError);
    EXPECT_THROW(parse_weight_spec("ar2:0.1"), ValidationError);
    EXPECT_THROW(parse_weight_spec("ar1:abc"), ValidationError);
}

TEST(Weights, RejectsNonStationarySpecs) {
    EXPECT_THROW(build_weight(WeightSpec::ar1(1.0, 5)), ValidationError);
    EXPECT_THROW(build_weight(WeightSpec::arma11(0.5, -1.2, 5)), ValidationError);
    EXPECT_THROW(build_weight(WeightSpec::ar1(0.5, 1)), ValidationError);
}

}  // namespace
}  // namespace pmwls
