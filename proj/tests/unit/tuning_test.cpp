#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "pmwls/error.hpp"
#include "pmwls/rng.hpp"
#include "pmwls/simulate.hpp"
#include "pmwls/tuning.hpp"
#include "test_support.hpp"

namespace pmwls {
namespace {

FitResult with_residuals(Vector r, Index df) {
    FitResult fit;
    fit.residuals = std::move(r);
    fit.df = df;
    return fit;
}

TEST(Tuning, BicHandExample) {
    Vector r(100);
    for (Index t = 0; t < 100; ++t) r(t) = t % 2 == 0 ? 1.0 : -1.0;
    BicValue b = bic(with_residuals(r, 2), 100);
    EXPECT_FALSE(b.degenerate);
    EXPECT_NEAR(b.sigma2, 1.0, 1e-15);
    EXPECT_NEAR(b.value, std::log(100.0) * 0.02, 1e-12);
    EXPECT_NEAR(b.value, 0.09210, 1e-5);
}

TEST(Tuning, BicDegenerateForConstantResiduals) {
    BicValue b = bic(with_residuals(Vector::Constant(10, 5.0), 1), 10);
    EXPECT_TRUE(b.degenerate);
    EXPECT_TRUE(std::isinf(b.value) && b.value < 0);
}

TEST(Tuning, BicIgnoresResidualShift) {
    std::mt19937_64 rng(1);
    Vector r = test::random_vector(50, rng);
    Vector s = r.array() + 3.0;
    EXPECT_NEAR(bic(with_residuals(r, 3), 50).value, bic(with_residuals(s, 3), 50).value, 1e-12);
}

TEST(Tuning, GridIsLogSpacedAndDescending) {
    GridSpec g;
    g.count = 5;
    g.floor_ratio = 1e-4;
    auto taus = tau_grid(2.0, g);
    ASSERT_EQ(taus.size(), 5u);
    EXPECT_DOUBLE_EQ(taus.front(), 2.0);
    EXPECT_NEAR(taus.back(), 2e-4, 1e-18);
    for (std::size_t i = 1; i < taus.size(); ++i) EXPECT_NEAR(taus[i - 1] / taus[i], 10.0, 1e-9);
    g.taus = {0.3, 0.2, 0.1};
    EXPECT_EQ(tau_grid(2.0, g), g.taus);
    g.taus = {0.3, 0.1, 0.2};
    EXPECT_THROW(validate(g), ValidationError);
}

TEST(Tuning, GridValidation) {
    GridSpec g;
    g.count = 0;
    EXPECT_THROW(validate(g), ValidationError);
    g = {};
    g.floor_ratio = 1.5;
    EXPECT_THROW(validate(g), ValidationError);
}

TEST(Tuning, SingleValueGrid) {
    auto inst = test::logistic_instance(40, 3, 2, 0.2);
    ObjectiveContext ctx(inst.data, logistic_model(3), build_weight(WeightSpec::identity(40)), Penalty::scad(0));
    GridSpec g;
    g.taus = {0.037};
    TuningResult res = select_tau(ctx, {}, g);
    EXPECT_DOUBLE_EQ(res.tau, 0.037);
    EXPECT_EQ(res.path.size(), 1u);
}

TEST(Tuning, TiesGoToTheLargerTau) {
    auto inst = test::logistic_instance(40, 3, 5, 0.2);
    ObjectiveContext ctx(inst.data, logistic_model(3), build_weight(WeightSpec::identity(40)), Penalty::scad(0));
    const double tau_max = stationary_tau(ctx, false);
    GridSpec g;
    g.taus = {4.0 * tau_max, 3.0 * tau_max, 2.0 * tau_max};
    TuningResult res = select_tau(ctx, {}, g);
    EXPECT_EQ(res.selected, 0);
    EXPECT_DOUBLE_EQ(res.tau, 4.0 * tau_max);
}

TEST(Tuning, TopOfPathIsEmpty) {
    auto inst = test::logistic_instance(60, 4, 8, 0.2);
    ObjectiveContext ctx(inst.data, logistic_model(4), build_weight(WeightSpec::ar1(0.5, 60)), Penalty::lasso(0));
    TuningResult res = select_tau(ctx, {});
    ASSERT_EQ(res.path.size(), 50u);
    EXPECT_DOUBLE_EQ(res.path.front().tau, res.tau_max);
    EXPECT_EQ(res.path.front().fit.df, 0);
    EXPECT_GT(res.path.back().fit.df, 0);
    for (std::size_t i = 1; i < res.path.size(); ++i) EXPECT_LT(res.path[i].tau, res.path[i - 1].tau);
}

TEST(Tuning, SelectedIsBicMinimum) {
    auto inst = test::logistic_instance(60, 4, 9, 0.2);
    ObjectiveContext ctx(inst.data, logistic_model(4), build_weight(WeightSpec::ar1(0.5, 60)), Penalty::scad(0));
    TuningResult res = select_tau(ctx, {});
    for (const auto& pt : res.path) EXPECT_GE(pt.bic.value, res.path[static_cast<std::size_t>(res.selected)].bic.value);
    EXPECT_DOUBLE_EQ(res.path[static_cast<std::size_t>(res.selected)].tau, res.tau);
}

TEST(Tuning, WarmStartsNeverLoseToColdStarts) {
    auto inst = test::logistic_instance(50, 4, 12, 0.2);
    ObjectiveContext ctx(inst.data, logistic_model(4), build_weight(WeightSpec::ar1(0.5, 50)), Penalty::lasso(0));
    GridSpec g;
    g.count = 12;
    g.floor_ratio = 1e-2;
    TuningResult res = select_tau(ctx, {}, g);
    int better_or_equal = 0;
    for (const auto& pt : res.path) {
        Penalty pen = Penalty::lasso(pt.tau);
        FitResult cold = fit_pmwls(ctx.with_penalty(pen));
        if (pt.fit.q_n <= cold.q_n + 1e-6 * std::max(1.0, cold.q_n)) ++better_or_equal;
    }
    EXPECT_EQ(better_or_equal, static_cast<int>(res.path.size()));
}

TEST(Tuning, LassoSparsityTrendsWithTau) {
    auto inst = test::logistic_instance(80, 6, 14, 0.3);
    ObjectiveContext ctx(inst.data, logistic_model(6), build_weight(WeightSpec::identity(80)), Penalty::lasso(0));
    TuningResult res = select_tau(ctx, {});
    // Spearman correlation between tau and the number of zero coefficients.
    const std::size_t m = res.path.size();
    auto ranks = [&](auto key) {
        std::vector<std::size_t> idx(m);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return key(a) < key(b); });
        std::vector<double> r(m);
        for (std::size_t i = 0; i < m;) {
            std::size_t j = i;
            while (j + 1 < m && key(idx[j + 1]) == key(idx[i])) ++j;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
            i = j + 1;
        }
        return r;
    };
    auto rt = ranks([&](std::size_t i) { return res.path[i].tau; });
    auto rz = ranks([&](std::size_t i) { return static_cast<double>(6 - res.path[i].fit.df); });
    double mt = std::accumulate(rt.begin(), rt.end(), 0.0) / m, mz = std::accumulate(rz.begin(), rz.end(), 0.0) / m;
    double num = 0, dt = 0, dz = 0;
    for (std::size_t i = 0; i < m; ++i) {
        num += (rt[i] - mt) * (rz[i] - mz);
        dt += (rt[i] - mt) * (rt[i] - mt);
        dz += (rz[i] - mz) * (rz[i] - mz);
    }
    EXPECT_GT(num / std::sqrt(dt * dz), 0.0);
}

// A noise coordinate survives BIC when its chi-square(1) gain exceeds log n, so even
// exact best-subset selection keeps the empty model with probability about
// (1 - P(chi2_1 > log 200))^20 = 0.65.
TEST(Tuning, PureNoiseSelectsTheEmptyModel) {
    const Index n = 200, d = 20, reps = 100;
    int empty = 0;
    for (Index rep = 0; rep < reps; ++rep) {
        Rng cov = make_rng(5, static_cast<std::uint64_t>(rep), Stream::covariates);
        Rng err = make_rng(5, static_cast<std::uint64_t>(rep), Stream::errors);
        RowMatrix x = gen_covariates(n, d, cov);
        ErrorProcessSpec spec;
        spec.rho = 0.0;
        spec.mu = 0.5;
        spec.sigma = 0.5;
        Vector y = gen_errors(spec, n, err);
        ObjectiveContext ctx(make_dataset(y, x), logistic_model(d), build_weight(WeightSpec::identity(n)),
                             Penalty::scad(0));
        SolverConfig cfg;
        cfg.bounds = Bounds{Vector::Constant(d, -5.0), Vector::Constant(d, 5.0)};
        if (select_tau(ctx, cfg).fit.df == 0) ++empty;
    }
    EXPECT_GE(empty, 55);
}

TEST(Tuning, PwlsPathHasIntercept) {
    auto inst = test::logistic_instance(50, 3, 19, 0.2);
    ObjectiveContext ctx = make_pwls_context(inst.data, logistic_model(3), WeightSpec::ar1(0.5, 50), Penalty::scad(0));
    GridSpec g;
    g.count = 10;
    TuningResult res = select_tau(ctx, {}, g, Estimator::pwls);
    ASSERT_TRUE(res.fit.beta0.has_value());
    EXPECT_GT(*res.fit.beta0, 0.0);
}

}  // namespace
}  // namespace pmwls
