#pragma once

#include <stdexcept>
#include <string>

namespace riskev {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input data or configuration (malformed files, violated preconditions).
class InputError : public Error {
public:
    using Error::Error;
};

/// Failure talking to the model service.
class TransportError : public Error {
public:
    enum class Kind { timeout, connection, protocol, http_status };

    TransportError(Kind kind, const std::string& what, int status = 0)
        : Error(what), kind_(kind), status_(status) {}

    Kind kind() const noexcept { return kind_; }
    // HTTP status for Kind::http_status, 0 otherwise.
    int status() const noexcept { return status_; }

private:
    Kind kind_;
    int status_;
};

inline const char* to_string(TransportError::Kind kind) {
    switch (kind) {
        case TransportError::Kind::timeout: return "timeout";
        case TransportError::Kind::connection: return "connection";
        case TransportError::Kind::protocol: return "protocol";
        case TransportError::Kind::http_status: return "http_status";
    }
    return "unknown";
}

}  // namespace riskev
