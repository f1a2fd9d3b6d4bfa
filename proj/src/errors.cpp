#include "railgate/errors.hpp"

namespace railgate {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::numeric_domain:
            return "numeric-domain";
        case ErrorKind::config:
            return "config";
        case ErrorKind::format:
            return "format";
        case ErrorKind::backend:
            return "backend";
        case ErrorKind::unsupported:
            return "unsupported";
        case ErrorKind::calibration:
            return "calibration";
        case ErrorKind::precondition:
            return "precondition";
    }
    return "unknown";
}

}  // namespace railgate
