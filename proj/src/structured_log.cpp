#include "railgate/structured_log.hpp"

#include <chrono>
#include <fstream>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "railgate/errors.hpp"

namespace railgate {

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    return fmt::format("{:%Y-%m-%dT%H:%M:%S}.{:03d}Z", fmt::gmtime(std::chrono::system_clock::to_time_t(now)), ms);
}

}  // namespace

StructuredLog::StructuredLog(std::ostream& out) : out_(&out) {}

StructuredLog::StructuredLog(const std::filesystem::path& path)
    : owned_(std::make_unique<std::ofstream>(path, std::ios::app)), out_(owned_.get()) {
    if (!*out_) throw ConfigError(fmt::format("cannot open log file '{}'", path.string()));
}

void StructuredLog::record(std::string_view request_id, const GuardReport& report) {
    nlohmann::json j;
    j["request_id"] = request_id;
    j["guard_name"] = to_string(report.guard);
    j["verdict"] = to_string(report.verdict);
    j["score"] = report.score ? nlohmann::json(*report.score) : nlohmann::json();
    j["threshold"] = report.threshold ? nlohmann::json(*report.threshold) : nlohmann::json();
    j["internal_detail"] = report.internal_detail;
    j["timestamp"] = utc_timestamp();
    write(j.dump());
}

void StructuredLog::record_event(std::string_view request_id, std::string_view guard_name, std::string_view verdict,
                                 std::string_view detail) {
    nlohmann::json j;
    j["request_id"] = request_id;
    j["guard_name"] = guard_name;
    j["verdict"] = verdict;
    j["score"] = nullptr;
    j["threshold"] = nullptr;
    j["internal_detail"] = detail;
    j["timestamp"] = utc_timestamp();
    write(j.dump());
}

void StructuredLog::write(const std::string& line) {
    std::lock_guard lock(mutex_);
    *out_ << line << '\n';
    out_->flush();
    ++records_;
}

std::size_t StructuredLog::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

}  // namespace railgate
