#include "railgate/types.hpp"

#include <cmath>

#include <fmt/format.h>

#include "railgate/errors.hpp"

namespace railgate {

void ModelContract::check() const {
    if (input_dim == 0) {
        throw ConfigError(fmt::format("model '{}': input_dim must be positive", model_id));
    }
    if (num_classes < 2) {
        throw ConfigError(fmt::format("model '{}': num_classes must be at least 2", model_id));
    }
    if (class_labels.size() != num_classes) {
        throw ConfigError(fmt::format("model '{}': {} class labels for {} classes", model_id,
                                      class_labels.size(), num_classes));
    }
    if (!feature_ranges.empty() && feature_ranges.size() != input_dim) {
        throw ConfigError(fmt::format("model '{}': {} feature ranges for input_dim {}", model_id,
                                      feature_ranges.size(), input_dim));
    }
    for (std::size_t j = 0; j < feature_ranges.size(); ++j) {
        const auto& r = feature_ranges[j];
        if (!(r.min < r.max)) {
            throw ConfigError(
                fmt::format("model '{}': feature {} range [{}, {}] is empty", model_id, j, r.min, r.max));
        }
    }
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw ConfigError(fmt::format("model '{}': temperature must be positive", model_id));
    }
    if (image_spec) {
        const auto& img = *image_spec;
        if (img.height == 0 || img.width == 0 || img.channels == 0) {
            throw ConfigError(fmt::format("model '{}': image dimensions must be positive", model_id));
        }
        if (!(img.value_min < img.value_max)) {
            throw ConfigError(fmt::format("model '{}': image value range is empty", model_id));
        }
    }
}

}  // namespace railgate
