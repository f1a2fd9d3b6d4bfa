#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "railgate/adversarial.hpp"
#include "railgate/drift.hpp"
#include "railgate/evaluation.hpp"
#include "railgate/model.hpp"
#include "railgate/ood.hpp"

namespace railgate::cli {

// Operator commands behind `railgate <subcommand>`. Each takes plain option
// structs so it can be driven from tests without a process boundary. Bad
// input surfaces as ConfigError / FormatError / PreconditionError /
// CalibrationError (exit code 2); anything else is a runtime failure (1).

using Path = std::filesystem::path;

struct FitArgs {
    Path data;
    Path out;
    double learning_rate = 0.1;
    std::size_t epochs = 500;
    std::uint64_t seed = 0;
};

FitResult cmd_fit(const FitArgs& args);

struct TrainDetectorArgs {
    Path model;
    Path data;
    Path out;
    double epsilon = 0.5;
    std::optional<ClipRange> clip;
    double tau = 0.5;
    double learning_rate = 0.5;
    std::size_t epochs = 2000;
    std::uint64_t seed = 0;
};

DetectorTrainingResult cmd_train_detector(const TrainDetectorArgs& args);

struct CalibrateArgs {
    Path model;
    Path data;
    Path out;
    double target_tpr = 0.95;
    std::size_t bins = 10;
    std::size_t window = 200;
    double drift_threshold = 0.25;
    std::size_t background_rows = 50;
    double temperature = 1.0;
    std::vector<OodDetector> detectors{OodDetector::msp, OodDetector::max_logit, OodDetector::energy};
    VotePolicy policy = VotePolicy::majority;
    std::uint64_t seed = 0;
};

struct CalibrationSummary {
    ReferenceStats stats;
    /// Per enabled detector: fraction of the calibration sample at or above
    /// its threshold.
    std::vector<std::pair<OodDetector, double>> achieved_tpr;
};

/// Scores the training file with the model, fits per-detector thresholds at
/// the target TPR, per-feature histograms, and a seeded background sample.
CalibrationSummary calibrate_reference(const BuiltinModel& model, const Dataset& data, const CalibrateArgs& args);
CalibrationSummary cmd_calibrate(const CalibrateArgs& args);

struct AttackArgs {
    Path model;
    Path data;
    Path out;
    double epsilon = 0.5;
    std::optional<ClipRange> clip;
};

/// Writes the FGSM-perturbed copy of `data`; labels are kept.
Dataset cmd_attack(const AttackArgs& args);

enum class EvalKind { ood, adversarial };

struct EvaluateArgs {
    EvalKind kind = EvalKind::ood;
    Path model;
    Path data;  // in-distribution / clean examples
    std::optional<Path> out;
    // ood
    std::optional<Path> reference;
    std::optional<Path> ood_data;
    double temperature = 1.0;
    // adversarial
    std::optional<Path> detector;
    std::optional<Path> adv_data;  // otherwise generated with FGSM at epsilon
    double epsilon = 0.5;
    std::optional<ClipRange> clip;
};

std::vector<EvalReport> cmd_evaluate(const EvaluateArgs& args);

/// Per-detector OOD reports: positives are in-distribution scores.
std::vector<EvalReport> evaluate_ood(const BuiltinModel& model, const Dataset& in_dist, const Dataset& ood,
                                     const OodThresholds& thresholds, double temperature);

/// Adversarial detector report: positives are perturbed inputs.
EvalReport evaluate_adversarial(const AdvDetector& detector, const Dataset& clean, const Dataset& perturbed);

/// Blocks serving the gateway described by the config file.
int cmd_serve(const Path& config);

}  // namespace railgate::cli
