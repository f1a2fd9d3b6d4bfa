#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string_view>

#include "railgate/envelope.hpp"

namespace railgate {

/// JSON-lines log of guard verdicts, one object per line:
///   {"request_id", "guard_name", "verdict", "score", "threshold",
///    "internal_detail", "timestamp"}
/// Thread-safe; each record is written and flushed under a lock.
class StructuredLog {
public:
    /// Writes to a caller-owned stream that must outlive the log.
    explicit StructuredLog(std::ostream& out);
    /// Appends to `path`.
    explicit StructuredLog(const std::filesystem::path& path);

    void record(std::string_view request_id, const GuardReport& report);
    void record_event(std::string_view request_id, std::string_view guard_name, std::string_view verdict,
                      std::string_view detail);

    std::size_t records() const;

private:
    void write(const std::string& line);

    std::unique_ptr<std::ostream> owned_;
    std::ostream* out_;
    mutable std::mutex mutex_;
    std::size_t records_ = 0;
};

}  // namespace railgate
