#pragma once

#include <memory>
#include <string>
#include <variant>

#include "railgate/model.hpp"
#include "railgate/types.hpp"

namespace railgate {

/// An inference service speaking the wire protocol:
///   POST {endpoint}/infer  {"features": [f64...]}  ->  200 {"logits": [f64...]}
struct RemoteEndpoint {
    std::string url;  // scheme://host:port
    int timeout_ms = 1000;
};

using BackendRef = std::variant<std::shared_ptr<const BuiltinModel>, RemoteEndpoint>;

/// Calls a remote backend and checks the response against the logits
/// contract. Any transport fault or malformed response is a BackendError.
Logits remote_infer(const RemoteEndpoint& endpoint, const FeatureVector& x, std::size_t expected_classes);

/// Runs inference on either backend kind. Result has `expected_classes`
/// finite entries or a BackendError is thrown.
Logits predict(const BackendRef& backend, const FeatureVector& x, std::size_t expected_classes);

}  // namespace railgate
