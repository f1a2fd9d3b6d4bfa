#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace railgate {

/// Model input. Dimensionless values in model input units.
struct FeatureVector {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    std::span<const double> view() const noexcept { return values; }
};

/// Pre-softmax class scores, one per class.
struct Logits {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    std::span<const double> view() const noexcept { return values; }
};

/// Softmax output; sums to one.
struct Probabilities {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    std::span<const double> view() const noexcept { return values; }
};

struct FeatureRange {
    double min = 0.0;
    double max = 0.0;
};

/// Declared shape of an image input that arrives flattened (h*w*c values).
struct ImageSpec {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 1;
    double min_contrast = 0.0;  // floor on the standard deviation of pixel values
    double value_min = 0.0;
    double value_max = 1.0;
    std::size_t min_pixels = 1;  // resolution floor on height*width
};

struct ModelContract {
    std::string model_id;
    std::size_t input_dim = 0;
    std::size_t num_classes = 0;
    std::vector<std::string> class_labels;
    std::vector<FeatureRange> feature_ranges;  // empty, or one per feature
    std::optional<ImageSpec> image_spec;
    double temperature = 1.0;

    /// Throws ConfigError when the contract is not well-formed.
    void check() const;
};

/// Labelled rows used for fitting, calibration and evaluation.
struct Dataset {
    std::vector<std::vector<double>> features;
    std::vector<std::size_t> labels;

    std::size_t size() const noexcept { return features.size(); }
    std::size_t dim() const noexcept { return features.empty() ? 0 : features.front().size(); }
    bool empty() const noexcept { return features.empty(); }
    void push_back(std::vector<double> row, std::size_t label) {
        features.push_back(std::move(row));
        labels.push_back(label);
    }
};

}  // namespace railgate
