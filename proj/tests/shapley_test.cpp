#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "railgate/errors.hpp"
#include "railgate/shapley.hpp"
#include "support/fixtures.hpp"

namespace railgate {
namespace {

ModelFn linear(std::vector<double> w, double b = 0.0) {
    return [w = std::move(w), b](std::span<const double> x) {
        double s = b;
        for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
        return Logits{{s, -s}};
    };
}

ModelFn wrap(const BuiltinModel& m) {
    return [&m](std::span<const double> x) { return m.predict(x); };
}

Background random_background(std::size_t rows, std::size_t dim, std::mt19937_64& rng) {
    Background bg;
    for (std::size_t r = 0; r < rows; ++r) bg.rows.push_back(testing::random_vector(dim, -1, 1, rng));
    return bg;
}

// phi_i = w_i (x_i - mean_b b_i) for a linear model.
std::vector<double> linear_oracle(const std::vector<double>& w, std::span<const double> x, const Background& bg) {
    std::vector<double> phi(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        double mean = 0.0;
        for (const auto& row : bg.rows) mean += row[i];
        mean /= static_cast<double>(bg.rows.size());
        phi[i] = w[i] * (x[i] - mean);
    }
    return phi;
}

TEST(ExactShapley, LinearExample) {
    const std::vector<double> x{1, 1};
    const auto e = exact_shapley(linear({2, 3}), x, Background{{{0, 0}}}, 0);
    EXPECT_NEAR(e.phi[0], 2.0, 1e-12);
    EXPECT_NEAR(e.phi[1], 3.0, 1e-12);
    EXPECT_NEAR(e.base_value, 0.0, 1e-12);
    EXPECT_TRUE(e.diagnostics.full_enumeration);
    EXPECT_EQ(e.diagnostics.coalitions, 4u);
}

TEST(ExactShapley, InteractionSplitsEvenly) {
    // f = x0 * x1: symmetric features share the interaction.
    const ModelFn f = [](std::span<const double> x) { return Logits{{x[0] * x[1]}}; };
    const auto e = exact_shapley(f, std::vector<double>{2, 2}, Background{{{0, 0}}}, 0);
    EXPECT_NEAR(e.phi[0], 2.0, 1e-12);
    EXPECT_NEAR(e.phi[1], 2.0, 1e-12);
}

TEST(ExactShapley, DummyFeatureGetsZero) {
    std::mt19937_64 rng(41);
    const ModelFn f = [](std::span<const double> x) { return Logits{{std::sin(x[0]) * x[2] + x[3] * x[3], 0.0}}; };
    for (int t = 0; t < 50; ++t) {
        const auto x = testing::random_vector(4, -2, 2, rng);
        const auto e = exact_shapley(f, x, random_background(5, 4, rng), 0);
        EXPECT_NEAR(e.phi[1], 0.0, 1e-12);
    }
}

TEST(ExactShapley, RejectsTooManyFeatures) {
    const std::vector<double> x(13, 1.0);
    try {
        exact_shapley(linear(std::vector<double>(13, 1.0)), x, Background{{std::vector<double>(13, 0.0)}}, 0);
        FAIL();
    } catch (const PreconditionError& e) {
        EXPECT_NE(std::string(e.what()).find("kernel_shap"), std::string::npos);
    }
}

TEST(ShapleyProperty, EfficiencyOnRandomModels) {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = 1 + t % 8;
        const auto m = t % 2 ? testing::random_logreg(d, 3, rng) : testing::random_mlp(d, 5, 3, rng);
        const auto x = testing::random_vector(d, -2, 2, rng);
        const auto bg = random_background(1 + t % 4, d, rng);
        const std::size_t c = static_cast<std::size_t>(t % 3);
        const auto e = exact_shapley(wrap(m), x, bg, c);
        const double fx = m.predict(x).values[c];
        const double sum = std::accumulate(e.phi.begin(), e.phi.end(), e.base_value);
        EXPECT_NEAR(sum, fx, 1e-9);
    }
}

TEST(ShapleyProperty, SymmetricFeaturesGetEqualValues) {
    std::mt19937_64 rng(47);
    for (int t = 0; t < 50; ++t) {
        // Model symmetric in x0, x1; x and background agree on both.
        const ModelFn f = [](std::span<const double> x) {
            return Logits{{std::tanh(x[0] + x[1]) + x[0] * x[1] * x[2], 0.0}};
        };
        auto x = testing::random_vector(3, -1, 1, rng);
        x[1] = x[0];
        auto bg = random_background(3, 3, rng);
        for (auto& r : bg.rows) r[1] = r[0];
        const auto e = exact_shapley(f, x, bg, 0);
        EXPECT_NEAR(e.phi[0], e.phi[1], 1e-12);
    }
}

TEST(KernelWeight, Examples) {
    EXPECT_DOUBLE_EQ(shap_kernel_weight(3, 1), 2.0 / (3.0 * 1 * 2));
    EXPECT_DOUBLE_EQ(shap_kernel_weight(4, 2), 3.0 / (6.0 * 2 * 2));
    EXPECT_DOUBLE_EQ(shap_kernel_weight(4, 2), 0.125);
    EXPECT_DOUBLE_EQ(shap_kernel_weight(2, 1), 0.5);
    EXPECT_THROW(shap_kernel_weight(4, 0), PreconditionError);
    EXPECT_THROW(shap_kernel_weight(4, 4), PreconditionError);
    for (std::size_t M = 2; M < 20; ++M) {
        for (std::size_t k = 1; k < M; ++k) EXPECT_DOUBLE_EQ(shap_kernel_weight(M, k), shap_kernel_weight(M, M - k));
    }
}

TEST(KernelShap, MatchesExactUnderFullEnumeration) {
    std::mt19937_64 rng(53);
    for (int t = 0; t < 60; ++t) {
        const std::size_t d = 1 + t % 7;
        const auto m = testing::random_mlp(d, 6, 2, rng);
        const auto x = testing::random_vector(d, -2, 2, rng);
        const auto bg = random_background(4, d, rng);
        const std::size_t budget = std::max<std::size_t>((std::size_t{1} << d), kernel_shap_min_samples(d));
        const auto k = kernel_shap(wrap(m), x, bg, 1, budget, 0);
        const auto e = exact_shapley(wrap(m), x, bg, 1);
        if (d > 1) {
            EXPECT_TRUE(k.diagnostics.full_enumeration);
        }
        for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(k.phi[i], e.phi[i], 1e-6) << "d=" << d << " i=" << i;
        EXPECT_NEAR(k.base_value, e.base_value, 1e-12);
    }
}

TEST(KernelShap, LinearModelRecoveredWhenSampling) {
    std::mt19937_64 rng(59);
    for (const std::size_t d : {6u, 10u, 16u, 24u}) {
        const auto w = testing::random_vector(d, -2, 2, rng);
        const auto x = testing::random_vector(d, -2, 2, rng);
        const auto bg = random_background(6, d, rng);
        const auto k = kernel_shap(linear(w, 0.3), x, bg, 0, 200, 7);
        const auto oracle = linear_oracle(w, x, bg);
        if (d > 7) {
            EXPECT_FALSE(k.diagnostics.full_enumeration);
        }
        for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(k.phi[i], oracle[i], 1e-6) << "d=" << d;
        const double sum = std::accumulate(k.phi.begin(), k.phi.end(), k.base_value);
        EXPECT_NEAR(sum, linear(w, 0.3)(x).values[0], 1e-9);
    }
}

TEST(KernelShap, SeededDeterminism) {
    std::mt19937_64 rng(61);
    const auto m = testing::random_mlp(14, 8, 2, rng);
    const auto x = testing::random_vector(14, -1, 1, rng);
    const auto bg = random_background(5, 14, rng);
    const auto a = kernel_shap(wrap(m), x, bg, 0, 300, 99);
    const auto b = kernel_shap(wrap(m), x, bg, 0, 300, 99);
    EXPECT_EQ(a.phi, b.phi);
    const double sum = std::accumulate(a.phi.begin(), a.phi.end(), a.base_value);
    EXPECT_NEAR(sum, m.predict(x).values[0], 1e-9);
}

TEST(KernelShap, RejectsTinyBudget) {
    const std::vector<double> x(5, 1.0);
    EXPECT_THROW(kernel_shap(linear(x), x, Background{{std::vector<double>(5, 0.0)}}, 0, kernel_shap_min_samples(5) - 1, 0),
                 PreconditionError);
}

TEST(CoalitionValue, Cases) {
    const auto f = linear({1, 10});
    const std::vector<double> x{3, 4};
    const Background bg{{{1, 1}, {3, 3}}};
    EXPECT_DOUBLE_EQ(coalition_value(f, x, bg, {false, false}, 0), 22.0);
    EXPECT_DOUBLE_EQ(coalition_value(f, x, bg, {true, false}, 0), 23.0);
    EXPECT_DOUBLE_EQ(coalition_value(f, x, bg, {false, true}, 0), 42.0);
    EXPECT_DOUBLE_EQ(coalition_value(f, x, bg, {true, true}, 0), 43.0);
    EXPECT_DOUBLE_EQ(coalition_value(f, x, bg, {true, true}, 1), -43.0);
}

}  // namespace
}  // namespace railgate
