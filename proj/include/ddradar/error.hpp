#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ddradar {

enum class ErrorCode {
    Config,
    NotInvertible,
    ModulusMismatch,
    IndexOutOfRange,
    NotPrimitive,
    AlphaNotCoprime,
    NotCoprime,
    BNotCoprime,
    DetNotOne,
    ZeroSequence,
    EmptyChip,
    BadRoot,
    ZeroSignal,
    GridMismatch,
    NotCrystallized,
    EngineUnsupported,
    Format,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::Config: return "Config";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::ModulusMismatch: return "ModulusMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NotPrimitive: return "NotPrimitive";
    case ErrorCode::AlphaNotCoprime: return "AlphaNotCoprime";
    case ErrorCode::NotCoprime: return "NotCoprime";
    case ErrorCode::BNotCoprime: return "BNotCoprime";
    case ErrorCode::DetNotOne: return "DetNotOne";
    case ErrorCode::ZeroSequence: return "ZeroSequence";
    case ErrorCode::EmptyChip: return "EmptyChip";
    case ErrorCode::BadRoot: return "BadRoot";
    case ErrorCode::ZeroSignal: return "ZeroSignal";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NotCrystallized: return "NotCrystallized";
    case ErrorCode::EngineUnsupported: return "EngineUnsupported";
    case ErrorCode::Format: return "Format";
    }
    return "Unknown";
}

// All library failures are reported through this one exception type; the code
// lets callers (and the CLI exit-code mapping) branch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ddradar
