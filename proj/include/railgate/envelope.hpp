#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace railgate {

enum class GuardName { validation, drift, adversarial, ood, explainability };
enum class Verdict { pass, flag, skipped, error };

std::string_view to_string(GuardName name) noexcept;
std::string_view to_string(Verdict verdict) noexcept;

/// One safeguard's verdict. `internal_detail` goes to the structured log
/// only; `external_message` is what a client may see.
struct GuardReport {
    GuardName guard = GuardName::validation;
    Verdict verdict = Verdict::pass;
    std::optional<double> score;
    std::optional<double> threshold;
    std::string internal_detail;
    std::string external_message;
    // Adversarial reports keep score and threshold out of client payloads.
    bool score_is_public = true;
};

enum class ErrorCode { validation, rejected, ood, drift, backend, internal };

/// "E_VALIDATION", "E_REJECTED", ...
std::string_view to_string(ErrorCode code) noexcept;

struct Prediction {
    std::string label;
    std::size_t index = 0;
    double confidence = 0.0;
};

struct Attribution {
    std::size_t feature_index = 0;
    double value = 0.0;
};

struct ResponseEnvelope {
    std::string request_id;
    int status_code = 500;
    std::optional<ErrorCode> error_code;
    std::optional<Prediction> prediction;
    std::optional<std::vector<Attribution>> explanation;
    std::vector<GuardReport> guard_trace;
    double latency_ms = 0.0;
    std::string message;
};

struct SuccessOutcome {
    Prediction prediction;
    std::optional<std::vector<Attribution>> explanation;
};

/// The report of the guard that stopped the pipeline.
struct GuardFailure {
    GuardReport report;
};

struct BackendFailure {
    std::string detail;
};

struct InternalFailure {
    std::string detail;
};

using PipelineOutcome = std::variant<SuccessOutcome, GuardFailure, BackendFailure, InternalFailure>;

inline constexpr std::string_view kGenericRejection = "request rejected";

/// Maps a pipeline outcome onto the status-code protocol. Total: every
/// outcome yields a well-formed envelope.
///
///   success                    200
///   validation flag            400 E_VALIDATION (field-level message)
///   adversarial flag           400 E_REJECTED   (generic message)
///   OOD flag                   500 E_OOD
///   drift flag (enforce mode)  500 E_DRIFT
///   backend failure            502 E_BACKEND
///   anything else              500 E_INTERNAL
ResponseEnvelope build_envelope(std::string request_id, PipelineOutcome outcome,
                                std::vector<GuardReport> guard_trace, double latency_ms);

/// Client-facing JSON. Absent optionals are omitted; guard reports carry
/// external fields only.
nlohmann::json to_json(const ResponseEnvelope& envelope);
nlohmann::json external_json(const GuardReport& report);

}  // namespace railgate
