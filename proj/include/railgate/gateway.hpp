#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "railgate/adversarial.hpp"
#include "railgate/backend.hpp"
#include "railgate/drift.hpp"
#include "railgate/envelope.hpp"
#include "railgate/metrics.hpp"
#include "railgate/ood.hpp"
#include "railgate/structured_log.hpp"
#include "railgate/types.hpp"

namespace railgate {

struct GuardToggles {
    bool validation = true;
    bool adversarial = true;
    bool drift = true;
    bool ood = true;
    bool explainability = true;
};

enum class DriftMode { monitor, enforce };
enum class ExplainMethod { automatic, exact, kernel };

struct ExplanationSettings {
    ExplainMethod method = ExplainMethod::automatic;
    std::size_t n_samples = 256;
    std::uint64_t seed = 0;
    std::size_t background_rows = 50;
};

/// Everything needed to guard one model, with artifacts already loaded.
struct ModelConfig {
    ModelContract contract;
    BackendRef backend;
    GuardToggles guards;
    DriftMode drift_mode = DriftMode::monitor;
    std::optional<AdvDetector> detector;
    std::optional<ReferenceStats> reference;
    OodThresholds ood;
    ExplanationSettings explanation;

    /// Throws ConfigError when an enabled guard lacks its artifacts.
    void check() const;
};

struct GatewayConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::optional<std::filesystem::path> log_path;
    std::vector<ModelConfig> models;
};

/// Parses the JSON config document; relative artifact paths resolve
/// against `base_dir`. See README for the schema.
GatewayConfig gateway_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
GatewayConfig load_gateway_config(const std::filesystem::path& path);

struct PredictRequest {
    std::optional<std::string> request_id;
    FeatureVector features;
};

/// Runs the guard pipeline for each request:
///   validate -> adversarial -> drift (window) -> predict -> ood -> explain
/// stopping at the first flag (drift stops only in enforce mode). Safe to
/// call concurrently: models, detectors and reference stats are read-only;
/// each drift window and the metrics take a short lock, never held across
/// backend calls.
class Gateway {
public:
    Gateway(std::vector<ModelConfig> models, std::shared_ptr<StructuredLog> log);
    ~Gateway();

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    /// Never throws; every failure becomes an envelope.
    ResponseEnvelope handle_predict(std::string_view model_id, PredictRequest request);

    /// Parses a `{"features": [...]}` body (optionally with "request_id")
    /// and runs handle_predict. Malformed bodies yield 400/E_VALIDATION.
    ResponseEnvelope handle_predict_body(std::string_view model_id, std::string_view body);

    /// Appends x to the model's drift window and scores it.
    GuardReport ingest_and_score_window(std::string_view model_id, const FeatureVector& x);

    MetricsSnapshot metrics() const;
    nlohmann::json health() const;

    std::vector<std::string> model_ids() const;
    const ModelConfig& model(std::string_view model_id) const;

private:
    struct Runtime;

    Runtime* find(std::string_view model_id) const;
    std::string next_request_id();
    GuardReport run_drift(Runtime& rt, const FeatureVector& x);
    GuardReport run_explanation(const Runtime& rt, const FeatureVector& x, std::size_t target_class,
                                std::optional<std::vector<Attribution>>& out);

    std::map<std::string, std::unique_ptr<Runtime>, std::less<>> runtimes_;
    std::shared_ptr<StructuredLog> log_;
    Metrics metrics_;
    std::uint64_t session_;
    std::atomic<std::uint64_t> counter_{0};
};

}  // namespace railgate
