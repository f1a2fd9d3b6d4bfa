#include "railgate/backend.hpp"

#include <cmath>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "railgate/errors.hpp"
#include "railgate/numeric.hpp"

namespace railgate {

namespace {

void check_logits(const Logits& logits, std::size_t expected_classes) {
    if (logits.size() != expected_classes) {
        throw BackendError(fmt::format("backend returned {} logits, contract declares {}", logits.size(),
                                       expected_classes));
    }
    if (!all_finite(logits.values)) {
        throw BackendError("backend returned non-finite logits");
    }
}

}  // namespace

Logits remote_infer(const RemoteEndpoint& endpoint, const FeatureVector& x, std::size_t expected_classes) {
    if (endpoint.timeout_ms <= 0) {
        throw ConfigError("remote backend timeout_ms must be positive");
    }
    httplib::Client client(endpoint.url);
    const auto sec = endpoint.timeout_ms / 1000;
    const auto usec = (endpoint.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);

    const nlohmann::json body = {{"features", x.values}};
    const auto res = client.Post("/infer", body.dump(), "application/json");
    if (!res) {
        throw BackendError(fmt::format("backend {} unreachable: {}", endpoint.url, httplib::to_string(res.error())));
    }
    if (res->status != 200) {
        throw BackendError(fmt::format("backend {} answered HTTP {}", endpoint.url, res->status));
    }

    // Non-standard tokens such as NaN make the body invalid JSON; that is
    // reported as a malformed response like any other parse failure.
    const auto doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("logits") || !doc["logits"].is_array()) {
        throw BackendError(fmt::format("backend {} sent a malformed response", endpoint.url));
    }
    Logits logits;
    for (const auto& v : doc["logits"]) {
        if (!v.is_number()) {
            throw BackendError(fmt::format("backend {} sent a non-numeric logit", endpoint.url));
        }
        logits.values.push_back(v.get<double>());
    }
    check_logits(logits, expected_classes);
    return logits;
}

Logits predict(const BackendRef& backend, const FeatureVector& x, std::size_t expected_classes) {
    if (const auto* remote = std::get_if<RemoteEndpoint>(&backend)) {
        return remote_infer(*remote, x, expected_classes);
    }
    const auto& model = std::get<std::shared_ptr<const BuiltinModel>>(backend);
    auto logits = model->predict(x.values);
    check_logits(logits, expected_classes);
    return logits;
}

}  // namespace railgate
