#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "railgate/envelope.hpp"
#include "railgate/types.hpp"

namespace railgate {

// Every score is oriented so that larger means more in-distribution.

double msp_score(const Probabilities& p);
double max_logit_score(const Logits& l);

/// Negated energy: T * log sum_i exp(l_i / T).
double energy_score(const Logits& l, double temperature = 1.0);

enum class OodDetector { msp, max_logit, energy };
enum class VotePolicy { any, majority, all };

std::string_view to_string(OodDetector d) noexcept;
std::string_view to_string(VotePolicy p) noexcept;
OodDetector ood_detector_from_string(std::string_view s);
VotePolicy vote_policy_from_string(std::string_view s);

double ood_score(OodDetector detector, const Logits& l, const Probabilities& p, double temperature);

struct DetectorThreshold {
    OodDetector detector = OodDetector::msp;
    double min_score = 0.0;
};

/// Enabled detectors with their thresholds, plus the vote combiner.
struct OodThresholds {
    std::vector<DetectorThreshold> detectors;
    VotePolicy policy = VotePolicy::any;

    std::optional<double> threshold_for(OodDetector d) const;
};

inline constexpr std::size_t kMinCalibrationSamples = 20;

/// Lower empirical quantile: sorted[floor((1 - target_tpr) * N)]. At least
/// target_tpr of the sample scores are >= the result.
double calibrate(std::span<const double> in_distribution_scores, double target_tpr);

/// Each enabled detector votes flag iff its score < its threshold. Majority
/// ties flag. With no detectors enabled the verdict is skipped.
GuardReport ood_verdict(const Logits& l, const Probabilities& p, const OodThresholds& thresholds,
                        double temperature = 1.0);

}  // namespace railgate
