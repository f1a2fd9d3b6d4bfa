#pragma once

#include <cstddef>
#include <span>

#include "railgate/types.hpp"

namespace railgate {

/// Temperature-scaled softmax with max-subtraction. Throws NumericDomainError
/// on non-finite logits or a non-positive temperature.
Probabilities softmax(const Logits& logits, double temperature = 1.0);

/// T * log(sum_i exp(v_i / T)), stable for large magnitudes.
double log_sum_exp(std::span<const double> values, double temperature = 1.0);

/// Index of the first maximal element. Precondition: non-empty.
std::size_t argmax(std::span<const double> values);

bool all_finite(std::span<const double> values) noexcept;

}  // namespace railgate
