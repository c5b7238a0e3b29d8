#include "evso/error.hpp"

namespace evso {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedFrame: return "TruncatedFrame";
    case ErrorCode::UnsupportedColorSpace: return "UnsupportedColorSpace";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::InvalidDims: return "InvalidDims";
    case ErrorCode::BlockTooLarge: return "BlockTooLarge";
    case ErrorCode::DimsMismatch: return "DimsMismatch";
    case ErrorCode::BlockOutOfRange: return "BlockOutOfRange";
    case ErrorCode::FrameTooSmall: return "FrameTooSmall";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorCode::ChunkTooSmall: return "ChunkTooSmall";
    case ErrorCode::InvalidRate: return "InvalidRate";
    case ErrorCode::ScheduleMismatch: return "ScheduleMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ChunkCountMismatch: return "ChunkCountMismatch";
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::NoVideoSets: return "NoVideoSets";
    case ErrorCode::BindFailure: return "BindFailure";
    case ErrorCode::MissingManifest: return "MissingManifest";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace evso
