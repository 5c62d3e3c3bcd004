#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pmwls/error.hpp"
#include "pmwls/model.hpp"
#include "test_support.hpp"

namespace pmwls {
namespace {

TEST(Model, LogisticAtZeroIsHalf) {
    ModelSpec m = logistic_model(3);
    Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(3);
    Vector theta(3);
    theta << 4.0, -2.0, 7.0;
    EXPECT_DOUBLE_EQ(m.eval(x, theta), 0.5);
}

TEST(Model, LogisticGradientAtZeroIndex) {
    ModelSpec m = logistic_model(2);
    Eigen::RowVectorXd x(2);
    x << 1.0, 0.0;
    Vector theta = Vector::Zero(2);
    Eigen::RowVectorXd g(2);
    m.grad(x, theta, g);
    EXPECT_DOUBLE_EQ(g(0), 0.25);
    EXPECT_DOUBLE_EQ(g(1), 0.0);
}

TEST(Model, LogisticAtSimulationTruth) {
    ModelSpec m = logistic_model(20);
    Vector theta = Vector::Zero(20);
    theta.head(3) << 1.0, 1.2, 0.6;
    Eigen::RowVectorXd e1 = Eigen::RowVectorXd::Zero(20);
    e1(0) = 1.0;
    EXPECT_NEAR(m.eval(e1, theta), 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
    EXPECT_NEAR(m.eval(e1, theta), 0.7311, 1e-4);
}

TEST(Model, GradientOfZeroRowsIsZero) {
    Dataset data = make_dataset(Vector::Ones(4), RowMatrix::Zero(4, 3));
    Matrix g = model_gradient(logistic_model(3), data, Vector::Constant(3, 0.7));
    EXPECT_EQ(g.rows(), 4);
    EXPECT_EQ(g.cols(), 3);
    EXPECT_EQ(g.norm(), 0.0);
}

TEST(Model, ConstantModelHasZeroGradient) {
    std::mt19937_64 rng(3);
    Dataset data = make_dataset(Vector::Ones(5), test::random_rows(5, 2, rng));
    Matrix g = model_gradient(constant_model(2, 1.5), data, Vector::Ones(2));
    EXPECT_EQ(g.norm(), 0.0);
    EXPECT_DOUBLE_EQ(model_values(constant_model(2, 1.5), data, Vector::Ones(2))(3), 1.5);
}

TEST(Model, AnalyticGradientMatchesCentralDifferences) {
    std::mt19937_64 rng(11);
    ModelSpec m = logistic_model(4);
    ModelSpec fd = m;
    fd.grad = nullptr;
    for (int trial = 0; trial < 20; ++trial) {
        Dataset data = make_dataset(Vector::Ones(10), test::random_rows(10, 4, rng));
        Vector theta = test::random_vector(4, rng);
        Matrix ga = model_gradient(m, data, theta);
        Matrix gf = model_gradient(fd, data, theta);
        double scale = std::max(1e-3, ga.cwiseAbs().maxCoeff());
        EXPECT_LT((ga - gf).cwiseAbs().maxCoeff() / scale, 1e-6);
    }
}

TEST(Model, LogisticIsStrictlyInsideUnitInterval) {
    std::mt19937_64 rng(5);
    ModelSpec m = logistic_model(3);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::RowVectorXd x = test::random_rows(1, 3, rng).row(0);
        Vector theta = test::random_vector(3, rng, 3.0);
        double f = m.eval(x, theta);
        EXPECT_GT(f, 0.0);
        EXPECT_LT(f, 1.0);
        Eigen::RowVectorXd g(3);
        m.grad(x, theta, g);
        for (Index k = 0; k < 3; ++k) EXPECT_NEAR(g(k), f * (1.0 - f) * x(k), 1e-15);
    }
}

TEST(Model, FiniteDifferenceFallbackOnNonlinearModel) {
    ModelSpec m;
    m.name = "exp-sine";
    m.dim_theta = 2;
    m.eval = [](RowView x, const Vector& th) { return std::exp(th(0) * x(0)) + std::sin(th(1) * x(1)); };
    std::mt19937_64 rng(8);
    Dataset data = make_dataset(Vector::Ones(6), test::random_rows(6, 2, rng));
    Vector theta = test::random_vector(2, rng);
    Matrix g = model_gradient(m, data, theta);
    for (Index t = 0; t < 6; ++t) {
        double x0 = data.x(t, 0), x1 = data.x(t, 1);
        double e0 = x0 * std::exp(theta(0) * x0);
        double e1 = x1 * std::cos(theta(1) * x1);
        EXPECT_NEAR(g(t, 0), e0, 1e-5 * std::max(1.0, std::abs(e0)));
        EXPECT_NEAR(g(t, 1), e1, 1e-5 * std::max(1.0, std::abs(e1)));
    }
}

TEST(Model, LogModelIsLogOfBase) {
    std::mt19937_64 rng(2);
    ModelSpec base = logistic_model(2);
    ModelSpec lm = log_model(base);
    Eigen::RowVectorXd x = test::random_rows(1, 2, rng).row(0);
    Vector theta = test::random_vector(2, rng);
    EXPECT_NEAR(lm.eval(x, theta), std::log(base.eval(x, theta)), 1e-14);
    Eigen::RowVectorXd g(2), gb(2);
    lm.grad(x, theta, g);
    base.grad(x, theta, gb);
    EXPECT_NEAR(g(0), gb(0) / base.eval(x, theta), 1e-14);
}

TEST(Model, DatasetValidation) {
    EXPECT_THROW(make_dataset(Vector::Ones(1), RowMatrix::Zero(1, 1)), ValidationError);
    EXPECT_THROW(make_dataset(Vector::Ones(3), RowMatrix::Zero(2, 1)), ValidationError);
    Vector y = Vector::Ones(3);
    y(1) = std::nan("");
    EXPECT_THROW(make_dataset(y, RowMatrix::Zero(3, 1)), ValidationError);
    Vector z(3);
    z << 1.0, -2.0, 3.0;
    EXPECT_THROW(make_dataset(z, RowMatrix::Zero(3, 1), true), ValidationError);
}

TEST(Model, LogIngestionKeepsRaw) {
    Vector z(3);
    z << 1.0, std::exp(1.0), 4.0;
    Dataset d = make_dataset(z, RowMatrix::Zero(3, 1), true);
    EXPECT_EQ(d.scale, Scale::log_of_multiplicative);
    ASSERT_TRUE(d.raw.has_value());
    EXPECT_NEAR(d.y(1), 1.0, 1e-15);
    EXPECT_EQ((*d.raw)(2), 4.0);
    EXPECT_EQ(raw_scale(d).y(2), 4.0);
}

TEST(Model, ModelByName) {
    EXPECT_EQ(model_by_name("logistic", 4).dim_theta, 4);
    EXPECT_EQ(model_by_name("linear", 2).dim_theta, 2);
    EXPECT_THROW(model_by_name("cubic", 2), ValidationError);
}

TEST(Model, NonFiniteGradientNamesTheEntry) {
    ModelSpec m;
    m.name = "bad";
    m.dim_theta = 1;
    m.eval = [](RowView x, const Vector& th) { return x(0) > 0.5 ? std::sqrt(-th(0) - 1.0) : th(0); };
    RowMatrix x(2, 1);
    x << 0.0, 1.0;
    Dataset data = make_dataset(Vector::Ones(2), x);
    try {
        model_gradient(m, data, Vector::Zero(1));
        FAIL() << "expected an error";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
    }
}

}  // namespace
}  // namespace pmwls
