#include "railgate/gateway.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "railgate/errors.hpp"
#include "railgate/numeric.hpp"
#include "railgate/shapley.hpp"
#include "railgate/validation.hpp"

namespace railgate {

struct Gateway::Runtime {
    explicit Runtime(ModelConfig cfg)
        : config(std::move(cfg)),
          window(config.reference ? config.reference->window_size : 1) {
        if (config.reference) {
            const auto& rows = config.reference->background;
            const auto n = std::min(rows.size(), config.explanation.background_rows);
            background.rows.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n));
        }
    }

    ModelConfig config;
    Background background;
    std::mutex window_mutex;
    DriftWindow window;
};

Gateway::Gateway(std::vector<ModelConfig> models, std::shared_ptr<StructuredLog> log) : log_(std::move(log)) {
    if (!log_) throw ConfigError("gateway needs a structured log");
    for (auto& m : models) {
        m.check();
        auto id = m.contract.model_id;
        if (runtimes_.contains(id)) throw ConfigError(fmt::format("duplicate model id '{}'", id));
        runtimes_.emplace(std::move(id), std::make_unique<Runtime>(std::move(m)));
    }
    std::random_device rd;
    session_ = (std::uint64_t{rd()} << 32) ^ rd();
}

Gateway::~Gateway() = default;

Gateway::Runtime* Gateway::find(std::string_view model_id) const {
    const auto it = runtimes_.find(model_id);
    return it == runtimes_.end() ? nullptr : it->second.get();
}

const ModelConfig& Gateway::model(std::string_view model_id) const {
    const auto* rt = find(model_id);
    if (!rt) throw ConfigError(fmt::format("unknown model '{}'", model_id));
    return rt->config;
}

std::vector<std::string> Gateway::model_ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : runtimes_) out.push_back(id);
    return out;
}

std::string Gateway::next_request_id() {
    return fmt::format("req-{:016x}-{:08x}", session_, counter_.fetch_add(1));
}

GuardReport Gateway::run_drift(Runtime& rt, const FeatureVector& x) {
    std::lock_guard lock(rt.window_mutex);
    rt.window.ingest(x.values);
    return drift_check(rt.window, *rt.config.reference);
}

GuardReport Gateway::ingest_and_score_window(std::string_view model_id, const FeatureVector& x) {
    auto* rt = find(model_id);
    if (!rt) throw ConfigError(fmt::format("unknown model '{}'", model_id));
    if (!rt->config.reference) throw ConfigError(fmt::format("model '{}' has no reference stats", model_id));
    auto report = run_drift(*rt, x);
    if (report.score) metrics_.record_drift(model_id, *report.score);
    return report;
}

GuardReport Gateway::run_explanation(const Runtime& rt, const FeatureVector& x, std::size_t target_class,
                                     std::optional<std::vector<Attribution>>& out) {
    GuardReport report;
    report.guard = GuardName::explainability;
    const auto& settings = rt.config.explanation;
    const auto& backend = rt.config.backend;
    const std::size_t classes = rt.config.contract.num_classes;
    const ModelFn fn = [&backend, classes](std::span<const double> v) {
        return predict(backend, FeatureVector{{v.begin(), v.end()}}, classes);
    };
    try {
        const bool exact = settings.method == ExplainMethod::exact ||
                           (settings.method == ExplainMethod::automatic && x.size() <= kMaxExactFeatures);
        const auto ex = exact ? exact_shapley(fn, x.values, rt.background, target_class)
                              : kernel_shap(fn, x.values, rt.background, target_class, settings.n_samples,
                                            settings.seed);
        std::vector<Attribution> attributions;
        attributions.reserve(ex.phi.size());
        for (std::size_t i = 0; i < ex.phi.size(); ++i) attributions.push_back({i, ex.phi[i]});
        out = std::move(attributions);
        report.verdict = Verdict::pass;
        report.internal_detail =
            fmt::format("{} shapley on class {} base_value={:.17g} coalitions={}{}", exact ? "exact" : "kernel",
                        target_class, ex.base_value, ex.diagnostics.coalitions,
                        ex.diagnostics.ridge_used ? " ridge=1e-8" : "");
    } catch (const std::exception& e) {
        out.reset();
        report.verdict = Verdict::error;
        report.internal_detail = fmt::format("explanation failed: {}", e.what());
        report.external_message = "explanation unavailable";
    }
    return report;
}

ResponseEnvelope Gateway::handle_predict(std::string_view model_id, PredictRequest request) {
    const auto start = std::chrono::steady_clock::now();
    const std::string id = request.request_id.value_or(next_request_id());
    std::vector<GuardReport> trace;

    const auto finish = [&](PipelineOutcome outcome) {
        const double latency =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        auto env = build_envelope(id, std::move(outcome), std::move(trace), latency);
        metrics_.record(env);
        return env;
    };
    const auto push = [&](GuardReport report) -> const GuardReport& {
        log_->record(id, report);
        trace.push_back(std::move(report));
        return trace.back();
    };

    try {
        auto* rt = find(model_id);
        if (!rt) {
            GuardReport report{GuardName::validation, Verdict::flag, std::nullopt, std::nullopt,
                               fmt::format("unknown model '{}'", model_id),
                               fmt::format("unknown model '{}'", model_id)};
            push(std::move(report));
            auto env = finish(GuardFailure{trace.back()});
            env.status_code = 404;
            return env;
        }
        const auto& cfg = rt->config;
        const auto& x = request.features;

        const auto skipped = [](GuardName g) {
            return GuardReport{g, Verdict::skipped, std::nullopt, std::nullopt, "guard disabled", {}};
        };

        if (const auto& r = push(cfg.guards.validation ? validate(x, cfg.contract) : skipped(GuardName::validation));
            r.verdict == Verdict::flag) {
            return finish(GuardFailure{r});
        }
        if (!cfg.guards.validation && (x.size() != cfg.contract.input_dim || !all_finite(x.values))) {
            // Downstream stages rely on arity and finiteness even when the
            // validation guard is switched off.
            return finish(InternalFailure{"unvalidated input does not match the model's input shape"});
        }

        if (const auto& r = push(cfg.guards.adversarial ? detect(*cfg.detector, x) : skipped(GuardName::adversarial));
            r.verdict == Verdict::flag) {
            return finish(GuardFailure{r});
        }

        GuardReport drift = cfg.guards.drift ? run_drift(*rt, x) : skipped(GuardName::drift);
        if (drift.score) metrics_.record_drift(model_id, *drift.score);
        if (const auto& r = push(std::move(drift)); r.verdict == Verdict::flag && cfg.drift_mode == DriftMode::enforce) {
            return finish(GuardFailure{r});
        }

        Logits logits;
        try {
            logits = predict(cfg.backend, x, cfg.contract.num_classes);
        } catch (const BackendError& e) {
            log_->record_event(id, "backend", "error", e.what());
            return finish(BackendFailure{e.what()});
        }
        const auto probs = softmax(logits, cfg.contract.temperature);

        if (const auto& r = push(cfg.guards.ood ? ood_verdict(logits, probs, cfg.ood, cfg.contract.temperature)
                                                : skipped(GuardName::ood));
            r.verdict == Verdict::flag) {
            return finish(GuardFailure{r});
        }

        const std::size_t top = argmax(probs.values);
        SuccessOutcome success{Prediction{cfg.contract.class_labels[top], top, probs.values[top]}, std::nullopt};
        push(cfg.guards.explainability ? run_explanation(*rt, x, top, success.explanation)
                                       : skipped(GuardName::explainability));
        return finish(std::move(success));
    } catch (const std::exception& e) {
        log_->record_event(id, "pipeline", "error", e.what());
        return finish(InternalFailure{e.what()});
    } catch (...) {
        log_->record_event(id, "pipeline", "error", "unknown exception");
        return finish(InternalFailure{"unknown exception"});
    }
}

ResponseEnvelope Gateway::handle_predict_body(std::string_view model_id, std::string_view body) {
    const auto reject = [&](std::string message, std::optional<std::string> request_id = std::nullopt) {
        // Reuses the validation path so the failure is traced and counted.
        const auto start = std::chrono::steady_clock::now();
        const std::string id = request_id.value_or(next_request_id());
        GuardReport report{GuardName::validation, Verdict::flag, std::nullopt, std::nullopt, message, message};
        log_->record(id, report);
        const double latency =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        auto env = build_envelope(id, GuardFailure{report}, {report}, latency);
        metrics_.record(env);
        return env;
    };

    const auto doc = nlohmann::json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return reject("request body is not a JSON object");
    std::optional<std::string> request_id;
    if (doc.contains("request_id")) {
        if (!doc["request_id"].is_string()) return reject("request_id must be a string");
        request_id = doc["request_id"].get<std::string>();
    }
    if (!doc.contains("features") || !doc["features"].is_array()) {
        return reject("request body needs a 'features' array", request_id);
    }
    PredictRequest req{request_id, {}};
    const auto& arr = doc["features"];
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (arr[i].is_number()) {
            req.features.values.push_back(arr[i].get<double>());
        } else if (arr[i].is_null()) {
            // JSON has no NaN literal; null marks a missing value and is
            // reported by the finiteness check.
            req.features.values.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
            return reject(fmt::format("features[{}] is not a number", i), request_id);
        }
    }
    return handle_predict(model_id, std::move(req));
}

MetricsSnapshot Gateway::metrics() const { return metrics_.snapshot(); }

nlohmann::json Gateway::health() const {
    return {{"status", "ok"}, {"models", model_ids()}};
}

}  // namespace railgate
