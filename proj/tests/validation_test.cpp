#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "railgate/validation.hpp"

namespace railgate {
namespace {

ModelContract tabular(std::size_t dim) {
    ModelContract c;
    c.model_id = "tab";
    c.input_dim = dim;
    c.num_classes = 2;
    c.class_labels = {"a", "b"};
    for (std::size_t i = 0; i < dim; ++i) c.feature_ranges.push_back({-10.0, 10.0});
    return c;
}

ModelContract image(std::size_t h, std::size_t w, double min_contrast, std::size_t min_pixels = 1) {
    ModelContract c;
    c.model_id = "img";
    c.input_dim = h * w;
    c.num_classes = 2;
    c.class_labels = {"a", "b"};
    c.image_spec = ImageSpec{h, w, 1, min_contrast, 0.0, 1.0, min_pixels};
    return c;
}

TEST(Validate, PassesWellFormedInput) {
    const auto r = validate(FeatureVector{{1, 2, 3, 4}}, tabular(4));
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_EQ(r.guard, GuardName::validation);
}

TEST(Validate, ArityMessageNamesLengths) {
    const auto r = validate(FeatureVector{{1, 2, 3}}, tabular(4));
    EXPECT_EQ(r.verdict, Verdict::flag);
    EXPECT_NE(r.external_message.find("expected 4 features, got 3"), std::string::npos);
    EXPECT_FALSE(r.internal_detail.empty());
}

TEST(Validate, NanNamesIndex) {
    const auto findings = find_validation_issues(FeatureVector{{0, 1, NAN, 3}}, tabular(4));
    ASSERT_EQ(findings.size(), 1u);
    EXPECT_EQ(findings[0].check, ValidationCheck::finiteness);
    EXPECT_EQ(findings[0].feature_index, 2u);
    const auto r = validate(FeatureVector{{0, 1, NAN, 3}}, tabular(4));
    EXPECT_NE(r.external_message.find("feature 2"), std::string::npos);
}

TEST(Validate, ListsAllFindingsOfFailingCategory) {
    const auto findings = find_validation_issues(FeatureVector{{INFINITY, 1, NAN, 30}}, tabular(4));
    ASSERT_EQ(findings.size(), 2u);  // range issue at 3 is a later category
    EXPECT_EQ(findings[0].feature_index, 0u);
    EXPECT_EQ(findings[1].feature_index, 2u);
}

TEST(Validate, RangeIsClosedInterval) {
    EXPECT_EQ(validate(FeatureVector{{-10, 10}}, tabular(2)).verdict, Verdict::pass);
    const auto findings = find_validation_issues(FeatureVector{{-10.0001, 10.5}}, tabular(2));
    ASSERT_EQ(findings.size(), 2u);
    EXPECT_EQ(findings[0].check, ValidationCheck::range);
    EXPECT_EQ(findings[1].feature_index, 1u);
}

TEST(Validate, ConstantImageFailsContrast) {
    const auto findings = find_validation_issues(FeatureVector{std::vector<double>(16, 0.5)}, image(4, 4, 0.05));
    ASSERT_EQ(findings.size(), 1u);
    EXPECT_EQ(findings[0].check, ValidationCheck::contrast);
    EXPECT_NE(findings[0].detail.find("contrast (pixel std) 0 below"), std::string::npos);
}

TEST(Validate, ImageChecks) {
    std::vector<double> checker(16);
    for (std::size_t i = 0; i < 16; ++i) checker[i] = i % 2 ? 1.0 : 0.0;
    EXPECT_EQ(validate(FeatureVector{checker}, image(4, 4, 0.05)).verdict, Verdict::pass);

    auto low_res = find_validation_issues(FeatureVector{checker}, image(4, 4, 0.05, 64));
    ASSERT_EQ(low_res.size(), 1u);
    EXPECT_EQ(low_res[0].check, ValidationCheck::resolution);

    auto out_of_range = checker;
    out_of_range[5] = 1.5;
    auto r = find_validation_issues(FeatureVector{out_of_range}, image(4, 4, 0.05));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].check, ValidationCheck::range);
    EXPECT_EQ(r[0].feature_index, 5u);

    // A contract whose input_dim disagrees with the image shape.
    auto inconsistent = image(4, 4, 0.05);
    inconsistent.input_dim = 15;
    auto dims = find_validation_issues(FeatureVector{std::vector<double>(15, 0.5)}, inconsistent);
    ASSERT_EQ(dims.size(), 1u);
    EXPECT_EQ(dims[0].check, ValidationCheck::image_dims);
}

TEST(ValidateProperty, EarliestCategoryWins) {
    // Random inputs with injected faults of several categories: the reported
    // category is always the earliest one present.
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> coin(0, 1);
    const auto c = tabular(6);
    for (int t = 0; t < 300; ++t) {
        std::vector<double> x(6, 0.0);
        const bool nan = coin(rng);
        const bool range = coin(rng);
        if (nan) x[static_cast<std::size_t>(t % 6)] = NAN;
        if (range) x[static_cast<std::size_t>((t + 3) % 6)] = 99.0;
        const bool arity = t % 7 == 0;
        if (arity) x.push_back(0.0);
        const FeatureVector fv{x};
        const auto before = fv.values;
        const auto findings = find_validation_issues(fv, c);
        ValidationCheck expected = ValidationCheck::arity;
        if (!arity) {
            if (nan) {
                expected = ValidationCheck::finiteness;
            } else if (range) {
                expected = ValidationCheck::range;
            }
        }
        if (!arity && !nan && !range) {
            EXPECT_TRUE(findings.empty());
        } else {
            ASSERT_FALSE(findings.empty());
            for (const auto& f : findings) EXPECT_EQ(f.check, expected);
        }
        // Input is never mutated.
        for (std::size_t i = 0; i < before.size(); ++i) {
            EXPECT_TRUE(before[i] == fv.values[i] || (std::isnan(before[i]) && std::isnan(fv.values[i])));
        }
    }
}

}  // namespace
}  // namespace railgate
