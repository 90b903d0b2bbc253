#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nhxy {

/// Error categories raised by the library. The CLI maps them onto exit codes.
enum class ErrorKind {
    domain,
    range,
    numeric,
    stiffness,
    root_find,
    eigensolver,
    spec,
    pt_broken,
    argument,
    fit,
    config,
    usage,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::domain: return "domain_error";
        case ErrorKind::range: return "range_error";
        case ErrorKind::numeric: return "numeric_error";
        case ErrorKind::stiffness: return "stiffness_error";
        case ErrorKind::root_find: return "root_find_error";
        case ErrorKind::eigensolver: return "eigensolver_error";
        case ErrorKind::spec: return "spec_error";
        case ErrorKind::pt_broken: return "pt_broken_error";
        case ErrorKind::argument: return "argument_error";
        case ErrorKind::fit: return "fit_error";
        case ErrorKind::config: return "config_error";
        case ErrorKind::usage: return "usage_error";
    }
    return "error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) raise(kind, message);
}

} // namespace nhxy
