#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "railgate/envelope.hpp"
#include "railgate/types.hpp"

namespace railgate {

/// Check categories, in the order they are evaluated.
enum class ValidationCheck { arity, finiteness, range, image_dims, contrast, resolution };

std::string_view to_string(ValidationCheck check) noexcept;

struct ValidationFinding {
    ValidationCheck check = ValidationCheck::arity;
    std::optional<std::size_t> feature_index;
    std::string detail;
};

/// Findings of the earliest failing category, all of them; empty when the
/// input passes. Image checks run only when the contract has an image_spec.
std::vector<ValidationFinding> find_validation_issues(const FeatureVector& x, const ModelContract& contract);

/// First pipeline stage. Never throws for bad input; the verdict carries it.
GuardReport validate(const FeatureVector& x, const ModelContract& contract);

}  // namespace railgate
