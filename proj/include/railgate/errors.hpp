#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace railgate {

enum class ErrorKind {
    numeric_domain,
    config,
    format,
    backend,
    unsupported,
    calibration,
    precondition,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base for every error raised by the library. Guards never throw for bad
/// inputs; they return verdicts. Exceptions are reserved for misuse,
/// unreadable artifacts and backend faults.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class NumericDomainError : public Error {
public:
    explicit NumericDomainError(const std::string& msg) : Error(ErrorKind::numeric_domain, msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(ErrorKind::config, msg) {}
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg) : Error(ErrorKind::format, msg) {}
};

/// Remote inference failed: timeout, transport error, non-200, or a
/// response that does not satisfy the logits contract.
class BackendError : public Error {
public:
    explicit BackendError(const std::string& msg) : Error(ErrorKind::backend, msg) {}
};

class UnsupportedError : public Error {
public:
    explicit UnsupportedError(const std::string& msg) : Error(ErrorKind::unsupported, msg) {}
};

class CalibrationError : public Error {
public:
    explicit CalibrationError(const std::string& msg) : Error(ErrorKind::calibration, msg) {}
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& msg) : Error(ErrorKind::precondition, msg) {}
};

}  // namespace railgate
