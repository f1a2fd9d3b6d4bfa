#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "railgate/envelope.hpp"

namespace railgate {

struct LatencyQuantiles {
    double p50 = 0.0;
    double p95 = 0.0;
    double p99 = 0.0;
};

struct MetricsSnapshot {
    std::uint64_t request_count = 0;
    std::map<std::string, std::uint64_t> status_class_counts;  // "2xx", "4xx", "5xx"
    std::map<std::string, std::uint64_t> error_code_counts;    // "E_..."
    std::map<std::string, std::uint64_t> guard_flag_counts;    // by guard name
    std::map<std::string, double> drift_last_score;            // by model id
    LatencyQuantiles latency_ms;
};

nlohmann::json to_json(const MetricsSnapshot& snapshot);

/// Request counters plus a sliding sample of recent latencies for the
/// quantiles (nearest-rank).
class Metrics {
public:
    explicit Metrics(std::size_t latency_window = 4096) : latency_window_(latency_window) {}

    void record(const ResponseEnvelope& envelope);
    void record_drift(std::string_view model_id, double score);
    MetricsSnapshot snapshot() const;

private:
    mutable std::mutex mutex_;
    std::size_t latency_window_;
    std::deque<double> latencies_;
    MetricsSnapshot counts_;
};

}  // namespace railgate
