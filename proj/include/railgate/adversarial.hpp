#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "railgate/envelope.hpp"
#include "railgate/model.hpp"
#include "railgate/types.hpp"

namespace railgate {

struct ClipRange {
    double lo = 0.0;
    double hi = 1.0;
};

/// Fast gradient sign method: x' = clip(x + eps * sign(grad_x loss(x, y))).
/// sign(0) = 0, so eps = 0 and zero gradients leave x unchanged.
std::vector<double> fgsm(const BuiltinModel& model, std::span<const double> x, std::size_t y, double epsilon,
                         std::optional<ClipRange> clip = std::nullopt);

struct AdvTrainingSet {
    Dataset data;  // label 0 = clean, 1 = perturbed
    std::vector<std::string> warnings;
};

/// One FGSM counterpart per clean example (attacking its true label),
/// shuffled with `seed`.
AdvTrainingSet build_adv_training_set(const BuiltinModel& model, const Dataset& clean, double epsilon,
                                      std::uint64_t seed, std::optional<ClipRange> clip = std::nullopt);

/// Auxiliary binary classifier over raw features; class 1 means adversarial.
struct AdvDetector {
    BuiltinModel model;
    double tau = 0.5;

    AdvDetector(BuiltinModel m, double threshold);

    /// Probability the input is adversarial.
    double score(std::span<const double> x) const;
};

/// Score >= tau flags. The external message is always the generic rejection
/// text; score, threshold and top contributing features stay internal.
GuardReport detect(const AdvDetector& detector, const FeatureVector& x);

struct DetectorTrainingOptions {
    double epsilon = 0.5;
    std::optional<ClipRange> clip;
    double tau = 0.5;
    double learning_rate = 0.5;
    std::size_t epochs = 2000;
    std::uint64_t seed = 0;
};

struct DetectorTrainingResult {
    AdvDetector detector;
    std::vector<std::string> warnings;
};

DetectorTrainingResult train_detector(const BuiltinModel& model, const Dataset& clean,
                                      const DetectorTrainingOptions& options);

// Detector file: the model document plus {"tau_adv": f64}.
void save_detector(const AdvDetector& detector, const std::filesystem::path& path);
AdvDetector load_detector(const std::filesystem::path& path);

}  // namespace railgate
