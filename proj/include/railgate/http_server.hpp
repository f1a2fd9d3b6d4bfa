#pragma once

#include <memory>
#include <string>

#include "railgate/gateway.hpp"

namespace httplib {
class Server;
}

namespace railgate {

/// HTTP front end:
///   POST /v1/models/{model_id}/predict  -> ResponseEnvelope (HTTP status = status_code)
///   GET  /v1/metrics                    -> MetricsSnapshot
///   GET  /healthz                       -> 200
class HttpServer {
public:
    explicit HttpServer(Gateway& gateway);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Blocks until stop() is called. Returns false if binding failed.
    bool listen(const std::string& host, int port);

    /// Binds an ephemeral port and returns it (or -1); follow with
    /// listen_after_bind() on a serving thread.
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();

    void stop();
    void wait_until_ready() const;

private:
    Gateway& gateway_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace railgate
