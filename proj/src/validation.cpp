#include "railgate/validation.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace railgate {

std::string_view to_string(ValidationCheck check) noexcept {
    switch (check) {
        case ValidationCheck::arity:
            return "arity";
        case ValidationCheck::finiteness:
            return "finiteness";
        case ValidationCheck::range:
            return "range";
        case ValidationCheck::image_dims:
            return "image_dims";
        case ValidationCheck::contrast:
            return "contrast";
        case ValidationCheck::resolution:
            return "resolution";
    }
    return "unknown";
}

namespace {

std::vector<ValidationFinding> check_finiteness(const FeatureVector& x) {
    std::vector<ValidationFinding> out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x.values[i])) {
            out.push_back({ValidationCheck::finiteness, i,
                           fmt::format("feature {} is not a finite number ({})", i, x.values[i])});
        }
    }
    return out;
}

std::vector<ValidationFinding> check_ranges(const FeatureVector& x, const ModelContract& contract) {
    std::vector<ValidationFinding> out;
    for (std::size_t i = 0; i < contract.feature_ranges.size() && i < x.size(); ++i) {
        const auto& r = contract.feature_ranges[i];
        const double v = x.values[i];
        if (v < r.min || v > r.max) {
            out.push_back({ValidationCheck::range, i,
                           fmt::format("feature {} = {} outside [{}, {}]", i, v, r.min, r.max)});
        }
    }
    if (contract.image_spec) {
        const auto& img = *contract.image_spec;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double v = x.values[i];
            const bool already = !contract.feature_ranges.empty() &&
                                 (v < contract.feature_ranges[i].min || v > contract.feature_ranges[i].max);
            if (!already && (v < img.value_min || v > img.value_max)) {
                out.push_back({ValidationCheck::range, i,
                               fmt::format("pixel {} = {} outside [{}, {}]", i, v, img.value_min, img.value_max)});
            }
        }
    }
    return out;
}

double population_stddev(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / n);
}

}  // namespace

std::vector<ValidationFinding> find_validation_issues(const FeatureVector& x, const ModelContract& contract) {
    if (x.size() != contract.input_dim) {
        return {{ValidationCheck::arity, std::nullopt,
                 fmt::format("expected {} features, got {}", contract.input_dim, x.size())}};
    }
    if (auto f = check_finiteness(x); !f.empty()) return f;
    if (auto r = check_ranges(x, contract); !r.empty()) return r;
    if (!contract.image_spec) return {};

    const auto& img = *contract.image_spec;
    const std::size_t expected = img.height * img.width * img.channels;
    if (x.size() != expected) {
        return {{ValidationCheck::image_dims, std::nullopt,
                 fmt::format("image {}x{}x{} needs {} values, got {}", img.height, img.width, img.channels, expected,
                             x.size())}};
    }
    const double contrast = population_stddev(x.values);
    if (contrast < img.min_contrast) {
        return {{ValidationCheck::contrast, std::nullopt,
                 fmt::format("image contrast (pixel std) {} below minimum {}", contrast, img.min_contrast)}};
    }
    if (img.height * img.width < img.min_pixels) {
        return {{ValidationCheck::resolution, std::nullopt,
                 fmt::format("image resolution {}x{} below minimum of {} pixels", img.height, img.width,
                             img.min_pixels)}};
    }
    return {};
}

GuardReport validate(const FeatureVector& x, const ModelContract& contract) {
    GuardReport report;
    report.guard = GuardName::validation;
    const auto findings = find_validation_issues(x, contract);
    if (findings.empty()) {
        report.verdict = Verdict::pass;
        return report;
    }
    report.verdict = Verdict::flag;
    std::string message = fmt::format("input validation failed ({})", to_string(findings.front().check));
    std::string sep = ": ";
    for (const auto& f : findings) {
        message += sep + f.detail;
        sep = "; ";
    }
    report.internal_detail = message;
    report.external_message = std::move(message);
    return report;
}

}  // namespace railgate
