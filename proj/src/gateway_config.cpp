#include <fmt/format.h>

#include "railgate/errors.hpp"
#include "railgate/gateway.hpp"
#include "railgate/model_io.hpp"

namespace railgate {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

ModelContract contract_from_json(const json& doc, const std::string& model_id) {
    ModelContract c;
    c.model_id = model_id;
    c.input_dim = doc.at("input_dim").get<std::size_t>();
    c.class_labels = doc.at("class_labels").get<std::vector<std::string>>();
    c.num_classes = c.class_labels.size();
    c.temperature = doc.value("temperature", 1.0);
    if (doc.contains("feature_ranges")) {
        for (const auto& r : doc["feature_ranges"]) {
            if (!r.is_array() || r.size() != 2) throw ConfigError("feature_ranges entries must be [min, max]");
            c.feature_ranges.push_back({r[0].get<double>(), r[1].get<double>()});
        }
    }
    if (doc.contains("image_spec")) {
        const auto& s = doc["image_spec"];
        ImageSpec img;
        img.height = s.at("height").get<std::size_t>();
        img.width = s.at("width").get<std::size_t>();
        img.channels = s.value("channels", std::size_t{1});
        img.min_contrast = s.value("min_contrast", 0.0);
        if (s.contains("value_range")) {
            img.value_min = s["value_range"].at(0).get<double>();
            img.value_max = s["value_range"].at(1).get<double>();
        }
        img.min_pixels = s.value("min_pixels", std::size_t{1});
        c.image_spec = img;
    }
    c.check();
    return c;
}

BackendRef backend_from_json(const json& doc, const std::filesystem::path& base) {
    const auto type = doc.at("type").get<std::string>();
    if (type == "builtin") {
        return std::make_shared<const BuiltinModel>(load_model(resolve(base, doc.at("model_path").get<std::string>())));
    }
    if (type == "remote") {
        RemoteEndpoint ep{doc.at("endpoint").get<std::string>(), doc.value("timeout_ms", 1000)};
        if (ep.timeout_ms <= 0) throw ConfigError("remote backend timeout_ms must be positive");
        return ep;
    }
    throw ConfigError(fmt::format("unknown backend type '{}'", type));
}

OodThresholds ood_from_json(const json& doc, const std::optional<ReferenceStats>& ref) {
    OodThresholds out;
    if (ref) out.policy = ref->thresholds.policy;
    if (doc.contains("policy")) out.policy = vote_policy_from_string(doc["policy"].get<std::string>());

    std::vector<OodDetector> enabled;
    if (doc.contains("detectors")) {
        for (const auto& d : doc["detectors"]) enabled.push_back(ood_detector_from_string(d.get<std::string>()));
    } else if (ref) {
        for (const auto& t : ref->thresholds.detectors) enabled.push_back(t.detector);
    }
    const json overrides = doc.value("thresholds", json::object());
    for (auto d : enabled) {
        const std::string name(to_string(d));
        std::optional<double> th;
        if (overrides.contains(name)) {
            th = overrides[name].get<double>();
        } else if (ref) {
            th = ref->thresholds.threshold_for(d);
        }
        if (!th) throw ConfigError(fmt::format("OOD detector '{}' is enabled but has no threshold", name));
        out.detectors.push_back({d, *th});
    }
    return out;
}

ExplainMethod explain_method_from_string(const std::string& s) {
    if (s == "auto") return ExplainMethod::automatic;
    if (s == "exact") return ExplainMethod::exact;
    if (s == "kernel") return ExplainMethod::kernel;
    throw ConfigError(fmt::format("unknown explanation method '{}'", s));
}

ModelConfig model_from_json(const json& doc, const std::filesystem::path& base) {
    ModelConfig m;
    const auto id = doc.at("model_id").get<std::string>();
    m.contract = contract_from_json(doc.at("contract"), id);
    m.backend = backend_from_json(doc.at("backend"), base);

    const json guards = doc.value("guards", json::object());
    m.guards.validation = guards.value("validation", true);
    m.guards.adversarial = guards.value("adversarial", true);
    m.guards.drift = guards.value("drift", true);
    m.guards.ood = guards.value("ood", true);
    m.guards.explainability = guards.value("explainability", true);

    const auto mode = doc.value("drift_mode", std::string("monitor"));
    if (mode == "monitor") {
        m.drift_mode = DriftMode::monitor;
    } else if (mode == "enforce") {
        m.drift_mode = DriftMode::enforce;
    } else {
        throw ConfigError(fmt::format("unknown drift_mode '{}'", mode));
    }

    if (doc.contains("detector_path")) {
        m.detector = load_detector(resolve(base, doc["detector_path"].get<std::string>()));
    }
    if (doc.contains("reference_stats_path")) {
        m.reference = load_reference_stats(resolve(base, doc["reference_stats_path"].get<std::string>()));
    }
    if (m.guards.ood) m.ood = ood_from_json(doc.value("ood", json::object()), m.reference);

    const json ex = doc.value("explanation", json::object());
    m.explanation.method = explain_method_from_string(ex.value("method", std::string("auto")));
    m.explanation.n_samples = ex.value("n_samples", m.explanation.n_samples);
    m.explanation.seed = ex.value("seed", m.explanation.seed);
    m.explanation.background_rows = ex.value("background_rows", m.explanation.background_rows);

    m.check();
    return m;
}

}  // namespace

void ModelConfig::check() const {
    contract.check();
    const auto& id = contract.model_id;
    if (const auto* builtin = std::get_if<std::shared_ptr<const BuiltinModel>>(&backend)) {
        if (!*builtin) throw ConfigError(fmt::format("model '{}': builtin backend is empty", id));
        if ((*builtin)->input_dim() != contract.input_dim || (*builtin)->num_classes() != contract.num_classes) {
            throw ConfigError(fmt::format("model '{}': backend dims {}x{} disagree with contract {}x{}", id,
                                          (*builtin)->num_classes(), (*builtin)->input_dim(), contract.num_classes,
                                          contract.input_dim));
        }
    }
    if (guards.adversarial) {
        if (!detector) throw ConfigError(fmt::format("model '{}': adversarial guard needs a detector", id));
        if (detector->model.input_dim() != contract.input_dim) {
            throw ConfigError(fmt::format("model '{}': detector input_dim differs from contract", id));
        }
    }
    if ((guards.drift || guards.explainability) && !reference) {
        throw ConfigError(fmt::format("model '{}': drift and explainability guards need reference stats", id));
    }
    if (reference && reference->histograms.size() != contract.input_dim) {
        throw ConfigError(fmt::format("model '{}': reference stats cover {} features, contract has {}", id,
                                      reference->histograms.size(), contract.input_dim));
    }
    if (guards.explainability && reference->background.empty()) {
        throw ConfigError(fmt::format("model '{}': explainability needs background rows in reference stats", id));
    }
    if (guards.ood && ood.detectors.empty()) {
        throw ConfigError(fmt::format("model '{}': OOD guard enabled with no detectors", id));
    }
}

GatewayConfig gateway_config_from_json(const json& doc, const std::filesystem::path& base_dir) {
    try {
        GatewayConfig cfg;
        if (doc.contains("listen")) {
            cfg.host = doc["listen"].value("host", cfg.host);
            cfg.port = doc["listen"].value("port", cfg.port);
        }
        if (doc.contains("log_path")) cfg.log_path = resolve(base_dir, doc["log_path"].get<std::string>());
        for (const auto& m : doc.at("models")) cfg.models.push_back(model_from_json(m, base_dir));
        if (cfg.models.empty()) throw ConfigError("config declares no models");
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("gateway config: {}", e.what()));
    } catch (const FormatError& e) {
        throw ConfigError(fmt::format("gateway config: {}", e.what()));
    }
}

GatewayConfig load_gateway_config(const std::filesystem::path& path) {
    json doc;
    try {
        doc = read_json_file(path);
    } catch (const FormatError& e) {
        throw ConfigError(e.what());
    }
    return gateway_config_from_json(doc, path.parent_path());
}

}  // namespace railgate
