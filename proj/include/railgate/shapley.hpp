#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "railgate/types.hpp"

namespace railgate {

/// The function being explained: features -> logits.
using ModelFn = std::function<Logits(std::span<const double>)>;

/// Reference rows used to "remove" features. Must be non-empty and finite.
struct Background {
    std::vector<std::vector<double>> rows;
};

struct ShapDiagnostics {
    bool full_enumeration = false;
    bool ridge_used = false;
    std::size_t coalitions = 0;
};

struct Explanation {
    std::size_t target_class = 0;
    std::vector<double> phi;
    double base_value = 0.0;  // v(empty coalition)
    ShapDiagnostics diagnostics;
};

inline constexpr std::size_t kMaxExactFeatures = 12;

/// v(S): mean over background rows of the class-c logit at the composite
/// input that takes x on S and the background row elsewhere. `in_coalition`
/// has one flag per feature.
double coalition_value(const ModelFn& model, std::span<const double> x, const Background& background,
                       const std::vector<bool>& in_coalition, std::size_t target_class);

/// Exact Shapley values by enumerating all 2^M coalitions. M <= 12.
Explanation exact_shapley(const ModelFn& model, std::span<const double> x, const Background& background,
                          std::size_t target_class);

/// Kernel SHAP weight of a coalition of size k out of M: (M-1) / (C(M,k) k (M-k)).
double shap_kernel_weight(std::size_t M, std::size_t k);

/// Minimum sample budget accepted by kernel_shap.
inline std::size_t kernel_shap_min_samples(std::size_t M) { return 2 * M + 4; }

/// Kernel SHAP. The empty and full coalitions are pinned exactly (efficiency
/// is eliminated from the regression by substitution). When n_samples covers
/// every proper coalition they are all enumerated with their kernel weights;
/// otherwise coalitions are drawn with probability proportional to their
/// weight using `seed`.
Explanation kernel_shap(const ModelFn& model, std::span<const double> x, const Background& background,
                        std::size_t target_class, std::size_t n_samples, std::uint64_t seed);

}  // namespace railgate
