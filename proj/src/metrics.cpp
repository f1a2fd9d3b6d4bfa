#include "railgate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace railgate {

namespace {

std::string status_class(int status) {
    if (status >= 200 && status < 300) return "2xx";
    if (status >= 400 && status < 500) return "4xx";
    if (status >= 500 && status < 600) return "5xx";
    return "other";
}

double nearest_rank(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

}  // namespace

void Metrics::record(const ResponseEnvelope& envelope) {
    std::lock_guard lock(mutex_);
    ++counts_.request_count;
    ++counts_.status_class_counts[status_class(envelope.status_code)];
    if (envelope.error_code) ++counts_.error_code_counts[std::string(to_string(*envelope.error_code))];
    for (const auto& r : envelope.guard_trace) {
        if (r.verdict == Verdict::flag) ++counts_.guard_flag_counts[std::string(to_string(r.guard))];
    }
    latencies_.push_back(envelope.latency_ms);
    while (latencies_.size() > latency_window_) latencies_.pop_front();
}

void Metrics::record_drift(std::string_view model_id, double score) {
    std::lock_guard lock(mutex_);
    counts_.drift_last_score[std::string(model_id)] = score;
}

MetricsSnapshot Metrics::snapshot() const {
    std::lock_guard lock(mutex_);
    MetricsSnapshot out = counts_;
    std::vector<double> sorted(latencies_.begin(), latencies_.end());
    std::sort(sorted.begin(), sorted.end());
    out.latency_ms = {nearest_rank(sorted, 0.50), nearest_rank(sorted, 0.95), nearest_rank(sorted, 0.99)};
    return out;
}

nlohmann::json to_json(const MetricsSnapshot& snapshot) {
    return {
        {"request_count", snapshot.request_count},
        {"status_class_counts", snapshot.status_class_counts},
        {"error_code_counts", snapshot.error_code_counts},
        {"guard_flag_counts", snapshot.guard_flag_counts},
        {"drift_last_score", snapshot.drift_last_score},
        {"latency_ms", {{"p50", snapshot.latency_ms.p50}, {"p95", snapshot.latency_ms.p95}, {"p99", snapshot.latency_ms.p99}}},
    };
}

}  // namespace railgate
