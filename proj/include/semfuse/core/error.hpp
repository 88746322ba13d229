#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace semfuse {

enum class ErrorCode {
    InvalidArgument,
    NoPoseAtTime,
    OutOfRange,
    IoError,
    MalformedBin,
    MalformedLabel,
    UnknownClassIndex,
    DuplicateTimestamp,
    NonFiniteValue,
    MissingColumn,
    MissingField,
    NonPositiveFocal,
    InvalidCamera,
    RowLengthMismatch,
    InsufficientPoints,
    NoFrames,
    FrameWithoutPose,
    ShapeMismatch,
    TooFewSamples,
    EmptySet,
    SingletonSet,
    NoValidCandidates,
    EmptyAfterFilter,
    LengthMismatch,
    ZeroHistogram,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NoPoseAtTime: return "NoPoseAtTime";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::MalformedBin: return "MalformedBin";
        case ErrorCode::MalformedLabel: return "MalformedLabel";
        case ErrorCode::UnknownClassIndex: return "UnknownClassIndex";
        case ErrorCode::DuplicateTimestamp: return "DuplicateTimestamp";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::MissingField: return "MissingField";
        case ErrorCode::NonPositiveFocal: return "NonPositiveFocal";
        case ErrorCode::InvalidCamera: return "InvalidCamera";
        case ErrorCode::RowLengthMismatch: return "RowLengthMismatch";
        case ErrorCode::InsufficientPoints: return "InsufficientPoints";
        case ErrorCode::NoFrames: return "NoFrames";
        case ErrorCode::FrameWithoutPose: return "FrameWithoutPose";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::EmptySet: return "EmptySet";
        case ErrorCode::SingletonSet: return "SingletonSet";
        case ErrorCode::NoValidCandidates: return "NoValidCandidates";
        case ErrorCode::EmptyAfterFilter: return "EmptyAfterFilter";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ZeroHistogram: return "ZeroHistogram";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace semfuse
