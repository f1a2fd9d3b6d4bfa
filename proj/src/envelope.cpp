#include "railgate/envelope.hpp"

#include <type_traits>
#include <utility>

namespace railgate {

std::string_view to_string(GuardName name) noexcept {
    switch (name) {
        case GuardName::validation:
            return "validation";
        case GuardName::drift:
            return "drift";
        case GuardName::adversarial:
            return "adversarial";
        case GuardName::ood:
            return "ood";
        case GuardName::explainability:
            return "explainability";
    }
    return "unknown";
}

std::string_view to_string(Verdict verdict) noexcept {
    switch (verdict) {
        case Verdict::pass:
            return "pass";
        case Verdict::flag:
            return "flag";
        case Verdict::skipped:
            return "skipped";
        case Verdict::error:
            return "error";
    }
    return "unknown";
}

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::validation:
            return "E_VALIDATION";
        case ErrorCode::rejected:
            return "E_REJECTED";
        case ErrorCode::ood:
            return "E_OOD";
        case ErrorCode::drift:
            return "E_DRIFT";
        case ErrorCode::backend:
            return "E_BACKEND";
        case ErrorCode::internal:
            return "E_INTERNAL";
    }
    return "E_INTERNAL";
}

namespace {

void fail(ResponseEnvelope& env, int status, ErrorCode code, std::string message) {
    env.status_code = status;
    env.error_code = code;
    env.message = std::move(message);
}

void apply_guard_failure(ResponseEnvelope& env, const GuardReport& report) {
    if (report.verdict != Verdict::flag) {
        fail(env, 500, ErrorCode::internal, "internal error");
        return;
    }
    switch (report.guard) {
        case GuardName::validation:
            fail(env, 400, ErrorCode::validation, report.external_message);
            return;
        case GuardName::adversarial:
            fail(env, 400, ErrorCode::rejected, std::string(kGenericRejection));
            return;
        case GuardName::ood:
            fail(env, 500, ErrorCode::ood, report.external_message);
            return;
        case GuardName::drift:
            fail(env, 500, ErrorCode::drift, report.external_message);
            return;
        case GuardName::explainability:
            break;
    }
    fail(env, 500, ErrorCode::internal, "internal error");
}

}  // namespace

ResponseEnvelope build_envelope(std::string request_id, PipelineOutcome outcome,
                                std::vector<GuardReport> guard_trace, double latency_ms) {
    ResponseEnvelope env;
    env.request_id = std::move(request_id);
    env.guard_trace = std::move(guard_trace);
    env.latency_ms = latency_ms >= 0.0 ? latency_ms : 0.0;

    std::visit(
        [&env](auto&& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, SuccessOutcome>) {
                env.status_code = 200;
                env.prediction = std::move(o.prediction);
                env.explanation = std::move(o.explanation);
                env.message = "ok";
            } else if constexpr (std::is_same_v<T, GuardFailure>) {
                apply_guard_failure(env, o.report);
            } else if constexpr (std::is_same_v<T, BackendFailure>) {
                fail(env, 502, ErrorCode::backend, "inference backend failed");
            } else {
                fail(env, 500, ErrorCode::internal, "internal error");
            }
        },
        std::move(outcome));
    return env;
}

nlohmann::json external_json(const GuardReport& report) {
    nlohmann::json j;
    j["guard_name"] = to_string(report.guard);
    j["verdict"] = to_string(report.verdict);
    if (report.score_is_public) {
        if (report.score) j["score"] = *report.score;
        if (report.threshold) j["threshold"] = *report.threshold;
    }
    if (!report.external_message.empty()) j["message"] = report.external_message;
    return j;
}

nlohmann::json to_json(const ResponseEnvelope& envelope) {
    nlohmann::json j;
    j["request_id"] = envelope.request_id;
    j["status_code"] = envelope.status_code;
    if (envelope.error_code) j["error_code"] = to_string(*envelope.error_code);
    if (envelope.prediction) {
        j["prediction"] = {{"label", envelope.prediction->label},
                           {"index", envelope.prediction->index},
                           {"confidence", envelope.prediction->confidence}};
    }
    if (envelope.explanation) {
        auto arr = nlohmann::json::array();
        for (const auto& a : *envelope.explanation) {
            arr.push_back({{"feature_index", a.feature_index}, {"value", a.value}});
        }
        j["explanation"] = std::move(arr);
    }
    auto trace = nlohmann::json::array();
    for (const auto& r : envelope.guard_trace) trace.push_back(external_json(r));
    j["guard_trace"] = std::move(trace);
    j["latency_ms"] = envelope.latency_ms;
    j["message"] = envelope.message;
    return j;
}

}  // namespace railgate
