#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "railgate/errors.hpp"
#include "railgate/evaluation.hpp"
#include "railgate/numeric.hpp"
#include "railgate/ood.hpp"
#include "support/fixtures.hpp"

namespace railgate {
namespace {

Logits L(std::vector<double> v) { return Logits{std::move(v)}; }

TEST(OodScores, Examples) {
    const auto l = L({10, 0});
    EXPECT_NEAR(energy_score(l), 10.0000453989, 1e-9);
    EXPECT_NEAR(energy_score(L({0, 0})), std::log(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(max_logit_score(l), 10.0);
    EXPECT_NEAR(msp_score(softmax(l)), 1.0 / (1.0 + std::exp(-10.0)), 1e-15);
    EXPECT_DOUBLE_EQ(msp_score(softmax(L({0, 0}))), 0.5);
    EXPECT_NEAR(energy_score(L({2, 2}), 2.0), 2.0 + 2.0 * std::log(2.0), 1e-12);
}

TEST(OodScores, MatchHighPrecisionReference) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> l(2 + t % 6);
        for (auto& v : l) v = u(rng);
        const double T = 0.5 + (t % 4);
        EXPECT_NEAR(energy_score(L(l), T), testing::log_sum_exp_reference(l, T), 1e-9 * std::max(1.0, std::abs(energy_score(L(l), T))));
        const auto ref = testing::softmax_reference(l, 1.0);
        EXPECT_NEAR(msp_score(softmax(L(l))), *std::max_element(ref.begin(), ref.end()), 1e-12);
    }
}

TEST(OodScores, Names) {
    for (auto d : {OodDetector::msp, OodDetector::max_logit, OodDetector::energy}) {
        EXPECT_EQ(ood_detector_from_string(to_string(d)), d);
    }
    for (auto p : {VotePolicy::any, VotePolicy::majority, VotePolicy::all}) {
        EXPECT_EQ(vote_policy_from_string(to_string(p)), p);
    }
    EXPECT_THROW(ood_detector_from_string("mahalanobis"), ConfigError);
    EXPECT_THROW(vote_policy_from_string("most"), ConfigError);
}

TEST(Calibrate, Examples) {
    std::vector<double> s;
    for (int i = 1; i <= 20; ++i) s.push_back(0.05 * i);
    EXPECT_DOUBLE_EQ(calibrate(s, 0.95), 0.10);

    std::vector<double> h(100);
    std::iota(h.begin(), h.end(), 1.0);
    std::shuffle(h.begin(), h.end(), std::mt19937_64(3));
    EXPECT_DOUBLE_EQ(calibrate(h, 0.5), 51.0);

    const std::vector<double> constant(30, 0.7);
    EXPECT_DOUBLE_EQ(calibrate(constant, 0.95), 0.7);
}

TEST(Calibrate, Errors) {
    EXPECT_THROW(calibrate(std::vector<double>(19, 1.0), 0.95), CalibrationError);
    EXPECT_THROW(calibrate(std::vector<double>(30, 1.0), 1.0), CalibrationError);
    EXPECT_THROW(calibrate(std::vector<double>(30, 1.0), 0.0), CalibrationError);
    std::vector<double> bad(30, 1.0);
    bad[4] = NAN;
    EXPECT_THROW(calibrate(bad, 0.9), CalibrationError);
}

TEST(CalibrateProperty, AchievesTargetByCounting) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0, 1);
    std::uniform_real_distribution<double> tpr(0.05, 0.99);
    for (int t = 0; t < 300; ++t) {
        std::vector<double> s(20 + t);
        for (auto& v : s) v = t % 3 ? n(rng) : std::round(n(rng) * 2.0);  // ties on some trials
        const double target = tpr(rng);
        const double thr = calibrate(s, target);
        const auto kept = std::count_if(s.begin(), s.end(), [&](double v) { return v >= thr; });
        EXPECT_GE(static_cast<double>(kept) / static_cast<double>(s.size()), target - 1e-12);
        EXPECT_NE(std::find(s.begin(), s.end(), thr), s.end());
    }
}

OodThresholds three(VotePolicy policy, double msp, double ml, double en) {
    return {{{OodDetector::msp, msp}, {OodDetector::max_logit, ml}, {OodDetector::energy, en}}, policy};
}

// Logits (1, 0): msp 0.731, max_logit 1, energy 1.313.
TEST(OodVerdict, PolicyRules) {
    const auto l = L({1, 0});
    const auto p = softmax(l);
    // Votes: msp flags, max_logit flags, energy passes.
    const auto two = [&](VotePolicy v) { return ood_verdict(l, p, three(v, 0.9, 2.0, 1.0)).verdict; };
    EXPECT_EQ(two(VotePolicy::any), Verdict::flag);
    EXPECT_EQ(two(VotePolicy::majority), Verdict::flag);
    EXPECT_EQ(two(VotePolicy::all), Verdict::pass);
    // Votes: one flag of three.
    const auto one = [&](VotePolicy v) { return ood_verdict(l, p, three(v, 0.9, 0.5, 1.0)).verdict; };
    EXPECT_EQ(one(VotePolicy::any), Verdict::flag);
    EXPECT_EQ(one(VotePolicy::majority), Verdict::pass);
    EXPECT_EQ(one(VotePolicy::all), Verdict::pass);
    // Exactly at threshold passes.
    EXPECT_EQ(ood_verdict(l, p, OodThresholds{{{OodDetector::max_logit, 1.0}}, VotePolicy::all}).verdict,
              Verdict::pass);
}

TEST(OodVerdict, MajorityTieFlags) {
    const auto l = L({1, 0});
    const OodThresholds t{{{OodDetector::msp, 0.9}, {OodDetector::max_logit, 0.5}}, VotePolicy::majority};
    const auto r = ood_verdict(l, softmax(l), t);
    EXPECT_EQ(r.verdict, Verdict::flag);
    EXPECT_NE(r.internal_detail.find("votes=1/2"), std::string::npos);
}

TEST(OodVerdict, NoDetectorsSkipped) {
    const auto l = L({1, 0});
    EXPECT_EQ(ood_verdict(l, softmax(l), OodThresholds{}).verdict, Verdict::skipped);
}

TEST(OodVerdict, ReportsWorstMargin) {
    const auto l = L({1, 0});
    const auto r = ood_verdict(l, softmax(l), three(VotePolicy::any, 0.5, 0.0, 1.3));
    ASSERT_TRUE(r.score && r.threshold);
    EXPECT_DOUBLE_EQ(*r.threshold, 1.3);
    EXPECT_NEAR(*r.score, energy_score(l), 1e-15);
    EXPECT_TRUE(r.score_is_public);
}

TEST(OodVerdictProperty, MonotoneInThreshold) {
    // Raising any threshold can only turn a pass into a flag.
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int t = 0; t < 500; ++t) {
        const auto l = L({u(rng), u(rng), u(rng)});
        const auto p = softmax(l);
        for (auto policy : {VotePolicy::any, VotePolicy::majority, VotePolicy::all}) {
            auto th = three(policy, 0.3 + 0.1 * u(rng), u(rng), u(rng));
            const bool before = ood_verdict(l, p, th).verdict == Verdict::flag;
            th.detectors[static_cast<std::size_t>(t % 3)].min_score += 0.5;
            const bool after = ood_verdict(l, p, th).verdict == Verdict::flag;
            EXPECT_TRUE(!before || after);
        }
    }
}

TEST(OodOrientation, InDistributionScoresHigher) {
    const auto train = testing::two_gaussians(3.0, 0.5, 200, 4);
    const auto model = fit_logistic(train, FitOptions{0.1, 300, 0}).model;
    const auto test = testing::two_gaussians(3.0, 0.5, 200, 5);
    // Points along the decision boundary, far from both classes.
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(0, 0.5);
    std::vector<double> in_msp, out_msp, in_en, out_en;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const auto l = model.predict(test.features[i]);
        in_msp.push_back(msp_score(softmax(l)));
        in_en.push_back(energy_score(l));
        const double a = n(rng) * 8.0;
        const auto lo = model.predict(std::vector<double>{a + n(rng), -a + n(rng)});
        out_msp.push_back(msp_score(softmax(lo)));
        out_en.push_back(energy_score(lo));
    }
    EXPECT_GT(auroc(in_msp, out_msp), 0.95);
    EXPECT_GT(auroc(in_en, out_en), 0.95);
}

TEST(Evaluation, AurocMatchesPairCounting) {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> n(0, 1);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> pos(1 + t % 37), neg(1 + t % 23);
        for (auto& v : pos) v = std::round(n(rng) * 3 + 0.5);
        for (auto& v : neg) v = std::round(n(rng) * 3);
        EXPECT_NEAR(auroc(pos, neg), testing::auroc_pairs(pos, neg), 1e-12);
    }
    EXPECT_DOUBLE_EQ(auroc(std::vector<double>{1, 2}, std::vector<double>{0}), 1.0);
    EXPECT_DOUBLE_EQ(auroc(std::vector<double>{1}, std::vector<double>{1}), 0.5);
    EXPECT_THROW(auroc(std::vector<double>{}, std::vector<double>{1}), PreconditionError);
}

TEST(Evaluation, ReportRates) {
    const std::vector<double> pos{0.9, 0.8, 0.4};
    const std::vector<double> neg{0.1, 0.5};
    const auto r = evaluate_detector("x", pos, neg, 0.5);
    EXPECT_DOUBLE_EQ(r.tpr, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.fpr, 0.5);
    EXPECT_EQ(r.n_positive, 3u);
    EXPECT_EQ(to_json(r).at("detector"), "x");
}

}  // namespace
}  // namespace railgate
