#include "railgate/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "railgate/errors.hpp"

namespace railgate {

bool all_finite(std::span<const double> values) noexcept {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

namespace {

void check_domain(std::span<const double> values, double temperature) {
    if (values.empty()) {
        throw NumericDomainError("empty logit vector");
    }
    if (!all_finite(values)) {
        throw NumericDomainError("non-finite logit");
    }
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw NumericDomainError("temperature must be positive and finite");
    }
}

}  // namespace

Probabilities softmax(const Logits& logits, double temperature) {
    check_domain(logits.view(), temperature);
    const double top = *std::max_element(logits.values.begin(), logits.values.end());
    Probabilities out;
    out.values.reserve(logits.size());
    double total = 0.0;
    for (double l : logits.values) {
        const double e = std::exp((l - top) / temperature);
        out.values.push_back(e);
        total += e;
    }
    for (double& p : out.values) {
        p /= total;
    }
    return out;
}

double log_sum_exp(std::span<const double> values, double temperature) {
    check_domain(values, temperature);
    const double top = *std::max_element(values.begin(), values.end());
    double total = 0.0;
    for (double v : values) {
        total += std::exp((v - top) / temperature);
    }
    return top + temperature * std::log(total);
}

std::size_t argmax(std::span<const double> values) {
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

}  // namespace railgate
