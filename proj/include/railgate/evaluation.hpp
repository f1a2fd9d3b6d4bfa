#pragma once

#include <cstddef>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

namespace railgate {

/// Mann-Whitney AUROC: P(pos > neg) + 0.5 P(pos == neg) over all pairs.
double auroc(std::span<const double> positive, std::span<const double> negative);

/// Fraction of scores >= threshold.
double rate_at_or_above(std::span<const double> scores, double threshold);

/// Detector quality. Positives are the class the score ranks high: in-
/// distribution for OOD scores, adversarial for the adversarial detector.
struct EvalReport {
    std::string detector;
    double auroc = 0.5;
    double threshold = 0.0;
    double tpr = 0.0;  // positives at or above threshold
    double fpr = 0.0;  // negatives at or above threshold
    std::size_t n_positive = 0;
    std::size_t n_negative = 0;
};

EvalReport evaluate_detector(std::string name, std::span<const double> positive, std::span<const double> negative,
                             double threshold);

nlohmann::json to_json(const EvalReport& report);

}  // namespace railgate
