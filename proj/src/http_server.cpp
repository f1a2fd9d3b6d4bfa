#include "railgate/http_server.hpp"

#include <httplib.h>

namespace railgate {

HttpServer::HttpServer(Gateway& gateway) : gateway_(gateway), server_(std::make_unique<httplib::Server>()) {
    server_->Post(R"(/v1/models/([^/]+)/predict)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto env = gateway_.handle_predict_body(req.matches[1].str(), req.body);
        res.status = env.status_code;
        res.set_content(to_json(env).dump(), "application/json");
    });
    server_->Get("/v1/metrics", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(to_json(gateway_.metrics()).dump(), "application/json");
    });
    server_->Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(gateway_.health().dump(), "application/json");
    });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::listen(const std::string& host, int port) { return server_->listen(host, port); }

int HttpServer::bind_to_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool HttpServer::listen_after_bind() { return server_->listen_after_bind(); }

void HttpServer::stop() {
    if (server_->is_running()) server_->stop();
}

void HttpServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace railgate
