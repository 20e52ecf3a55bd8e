#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uds {

enum class ErrorCode {
    InvalidInput,
    DegenerateDuration,
    NotReady,
    ClassCoverage,
    Parse,
    Io,
    SimulationFault,
    Config,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidInput: return "invalid-input";
        case ErrorCode::DegenerateDuration: return "degenerate-duration";
        case ErrorCode::NotReady: return "not-ready";
        case ErrorCode::ClassCoverage: return "class-coverage";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::Io: return "io";
        case ErrorCode::SimulationFault: return "simulation-fault";
        case ErrorCode::Config: return "config";
    }
    return "unknown";
}

// All library failures are reported through this type; `code()` is stable
// and machine-checkable, `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace uds
