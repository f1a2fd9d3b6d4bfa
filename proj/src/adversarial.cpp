#include "railgate/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "railgate/errors.hpp"
#include "railgate/model_io.hpp"
#include "railgate/numeric.hpp"

namespace railgate {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::vector<double> fgsm(const BuiltinModel& model, std::span<const double> x, std::size_t y, double epsilon,
                         std::optional<ClipRange> clip) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw PreconditionError("FGSM epsilon must be a non-negative finite number");
    }
    const auto grad = model.loss_gradient(x, y);
    std::vector<double> out(x.begin(), x.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += epsilon * sign(grad[i]);
        if (clip) out[i] = std::clamp(out[i], clip->lo, clip->hi);
    }
    return out;
}

AdvTrainingSet build_adv_training_set(const BuiltinModel& model, const Dataset& clean, double epsilon,
                                      std::uint64_t seed, std::optional<ClipRange> clip) {
    if (clean.empty()) {
        throw PreconditionError("adversarial training set needs at least one clean example");
    }
    AdvTrainingSet out;
    if (epsilon == 0.0) {
        out.warnings.push_back("epsilon is 0: clean and perturbed classes are identical point sets");
    }
    std::vector<std::size_t> order(clean.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    for (std::size_t i : order) {
        const auto& x = clean.features[i];
        out.data.push_back(x, 0);
        out.data.push_back(fgsm(model, x, clean.labels[i], epsilon, clip), 1);
    }
    return out;
}

AdvDetector::AdvDetector(BuiltinModel m, double threshold) : model(std::move(m)), tau(threshold) {
    if (model.kind() != ModelKind::logistic_regression || model.num_classes() != 2) {
        throw ConfigError("adversarial detector must be a binary logistic regression");
    }
    if (!(tau > 0.0 && tau < 1.0)) {
        throw ConfigError(fmt::format("adversarial threshold {} must lie in (0, 1)", tau));
    }
}

double AdvDetector::score(std::span<const double> x) const {
    return softmax(model.predict(x)).values[1];
}

GuardReport detect(const AdvDetector& detector, const FeatureVector& x) {
    GuardReport report;
    report.guard = GuardName::adversarial;
    report.score_is_public = false;
    const double s = detector.score(x.values);
    report.score = s;
    report.threshold = detector.tau;
    report.verdict = s >= detector.tau ? Verdict::flag : Verdict::pass;
    report.external_message = report.verdict == Verdict::flag ? std::string(kGenericRejection) : std::string();

    // Contribution of feature i to the adversarial-vs-clean logit margin.
    const auto& w = std::get<LogisticRegression>(detector.model.params()).weights;
    std::vector<std::pair<double, std::size_t>> contrib;
    contrib.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        contrib.emplace_back((w(1, i) - w(0, i)) * x.values[i], i);
    }
    const std::size_t top = std::min<std::size_t>(3, contrib.size());
    std::partial_sort(contrib.begin(), contrib.begin() + static_cast<std::ptrdiff_t>(top), contrib.end(),
                      [](const auto& a, const auto& b) {
                          return std::abs(a.first) != std::abs(b.first) ? std::abs(a.first) > std::abs(b.first)
                                                                        : a.second < b.second;
                      });
    std::string detail = fmt::format("E_ADVERSARIAL adversarial score={:.17g} tau_adv={:.17g} top_features=[", s,
                                     detector.tau);
    for (std::size_t k = 0; k < top; ++k) {
        detail += fmt::format("{}f{}:{:.6g}", k ? ", " : "", contrib[k].second, contrib[k].first);
    }
    detail += "]";
    report.internal_detail = std::move(detail);
    return report;
}

DetectorTrainingResult train_detector(const BuiltinModel& model, const Dataset& clean,
                                      const DetectorTrainingOptions& options) {
    auto set = build_adv_training_set(model, clean, options.epsilon, options.seed, options.clip);
    auto fit = fit_logistic(set.data, FitOptions{options.learning_rate, options.epochs, options.seed});
    return DetectorTrainingResult{AdvDetector(std::move(fit.model), options.tau), std::move(set.warnings)};
}

void save_detector(const AdvDetector& detector, const std::filesystem::path& path) {
    auto doc = model_to_json(detector.model);
    doc["tau_adv"] = detector.tau;
    write_json_file(doc, path);
}

AdvDetector load_detector(const std::filesystem::path& path) {
    const auto doc = read_json_file(path);
    if (!doc.contains("tau_adv") || !doc["tau_adv"].is_number()) {
        throw FormatError(fmt::format("'{}': detector has no numeric 'tau_adv'", path.string()));
    }
    try {
        return AdvDetector(model_from_json(doc), doc["tau_adv"].get<double>());
    } catch (const FormatError& e) {
        throw FormatError(fmt::format("'{}': {}", path.string(), e.what()));
    }
}

}  // namespace railgate
