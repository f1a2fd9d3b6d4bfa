#include "railgate/ood.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "railgate/errors.hpp"
#include "railgate/numeric.hpp"

namespace railgate {

double msp_score(const Probabilities& p) {
    if (p.values.empty()) throw NumericDomainError("empty probability vector");
    return *std::max_element(p.values.begin(), p.values.end());
}

double max_logit_score(const Logits& l) {
    if (l.values.empty()) throw NumericDomainError("empty logit vector");
    return *std::max_element(l.values.begin(), l.values.end());
}

double energy_score(const Logits& l, double temperature) {
    return log_sum_exp(l.values, temperature);
}

std::string_view to_string(OodDetector d) noexcept {
    switch (d) {
        case OodDetector::msp:
            return "msp";
        case OodDetector::max_logit:
            return "max_logit";
        case OodDetector::energy:
            return "energy";
    }
    return "unknown";
}

std::string_view to_string(VotePolicy p) noexcept {
    switch (p) {
        case VotePolicy::any:
            return "any";
        case VotePolicy::majority:
            return "majority";
        case VotePolicy::all:
            return "all";
    }
    return "unknown";
}

OodDetector ood_detector_from_string(std::string_view s) {
    if (s == "msp") return OodDetector::msp;
    if (s == "max_logit") return OodDetector::max_logit;
    if (s == "energy") return OodDetector::energy;
    throw ConfigError(fmt::format("unknown OOD detector '{}'", s));
}

VotePolicy vote_policy_from_string(std::string_view s) {
    if (s == "any") return VotePolicy::any;
    if (s == "majority") return VotePolicy::majority;
    if (s == "all") return VotePolicy::all;
    throw ConfigError(fmt::format("unknown vote policy '{}'", s));
}

double ood_score(OodDetector detector, const Logits& l, const Probabilities& p, double temperature) {
    switch (detector) {
        case OodDetector::msp:
            return msp_score(p);
        case OodDetector::max_logit:
            return max_logit_score(l);
        case OodDetector::energy:
            return energy_score(l, temperature);
    }
    throw NumericDomainError("unknown detector");
}

std::optional<double> OodThresholds::threshold_for(OodDetector d) const {
    for (const auto& t : detectors) {
        if (t.detector == d) return t.min_score;
    }
    return std::nullopt;
}

double calibrate(std::span<const double> in_distribution_scores, double target_tpr) {
    if (in_distribution_scores.size() < kMinCalibrationSamples) {
        throw CalibrationError(fmt::format("calibration needs at least {} scores, got {}", kMinCalibrationSamples,
                                           in_distribution_scores.size()));
    }
    if (!(target_tpr > 0.0 && target_tpr < 1.0)) {
        throw CalibrationError(fmt::format("target TPR {} must lie in (0, 1)", target_tpr));
    }
    if (!all_finite(in_distribution_scores)) {
        throw CalibrationError("calibration scores must be finite");
    }
    std::vector<double> sorted(in_distribution_scores.begin(), in_distribution_scores.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    const auto index = static_cast<std::size_t>(std::floor((1.0 - target_tpr) * n));
    return sorted[std::min(index, sorted.size() - 1)];
}

GuardReport ood_verdict(const Logits& l, const Probabilities& p, const OodThresholds& thresholds,
                        double temperature) {
    GuardReport report;
    report.guard = GuardName::ood;
    if (thresholds.detectors.empty()) {
        report.verdict = Verdict::skipped;
        report.internal_detail = "no OOD detectors enabled";
        return report;
    }

    std::size_t flags = 0;
    std::string detail;
    // The report's own score/threshold is the weakest vote: the detector with
    // the smallest margin above (or furthest below) its threshold.
    double worst_margin = 0.0;
    bool first = true;
    for (const auto& t : thresholds.detectors) {
        const double s = ood_score(t.detector, l, p, temperature);
        const bool vote = s < t.min_score;
        flags += vote ? 1 : 0;
        detail += fmt::format("{}{}={:.17g} (min {:.17g}, {})", first ? "" : "; ", to_string(t.detector), s,
                              t.min_score, vote ? "flag" : "pass");
        const double margin = s - t.min_score;
        if (first || margin < worst_margin) {
            worst_margin = margin;
            report.score = s;
            report.threshold = t.min_score;
        }
        first = false;
    }

    const std::size_t n = thresholds.detectors.size();
    bool flagged = false;
    switch (thresholds.policy) {
        case VotePolicy::any:
            flagged = flags >= 1;
            break;
        case VotePolicy::majority:
            flagged = 2 * flags >= n;
            break;
        case VotePolicy::all:
            flagged = flags == n;
            break;
    }
    report.verdict = flagged ? Verdict::flag : Verdict::pass;
    report.internal_detail = fmt::format("policy={} votes={}/{}: {}", to_string(thresholds.policy), flags, n, detail);
    report.external_message =
        fmt::format("out-of-distribution check {} (policy {})", flagged ? "failed" : "passed", to_string(thresholds.policy));
    return report;
}

}  // namespace railgate
